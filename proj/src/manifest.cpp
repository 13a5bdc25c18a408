#include "msnm/manifest.hpp"

#include <fstream>
#include <iterator>
#include <memory>

#include <json.hpp>
#include <openssl/evp.h>

#include "msnm/error.hpp"

#ifndef MSNM_VERSION
#define MSNM_VERSION "0.0.0"
#endif

namespace msnm {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return "sha256:" + sha256_hex(bytes);
}

void RunManifest::add_input(const std::filesystem::path& path) {
  input_digests[path.string()] = file_digest(path);
}

void RunManifest::add_output(const std::filesystem::path& path) {
  output_digests[path.string()] = file_digest(path);
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["tool_version"] = tool_version;
  j["parameters"] = parameters;
  j["input_digests"] = input_digests;
  j["output_digests"] = output_digests;
  return j.dump(2) + "\n";
}

std::filesystem::path write_manifest(const std::filesystem::path& output,
                                     const RunManifest& manifest) {
  auto path = output;
  path += ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << manifest.to_json();
  return path;
}

std::string_view tool_version() { return MSNM_VERSION; }

}  // namespace msnm
