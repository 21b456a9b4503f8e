#include "invlab/manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>

#include "json.hpp"
#include "invlab/common.hpp"

namespace invlab {

namespace {

using Json = nlohmann::ordered_json;

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
  }
  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("SHA-256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw Error("SHA-256 final failed");
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(digits[md[i] >> 4]);
      out.push_back(digits[md[i] & 15]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

Json digests_json(const std::vector<FileDigest>& files) {
  Json arr = Json::array();
  for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return arr;
}

std::vector<FileDigest> digests_from(const Json& arr) {
  std::vector<FileDigest> out;
  for (const auto& item : arr) out.push_back({item.at("path").get<std::string>(), item.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

FileDigest digest_file(const std::filesystem::path& path, std::string label) {
  return {std::move(label), sha256_file(path)};
}

std::string manifest_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config_paths"] = m.config_paths;
  j["inputs"] = digests_json(m.inputs);
  j["out_dir"] = m.out_dir;
  j["outputs"] = digests_json(m.outputs);
  j["version"] = m.version;
  j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config_paths = j.at("config_paths").get<std::vector<std::string>>();
    m.inputs = digests_from(j.at("inputs"));
    m.out_dir = j.at("out_dir").get<std::string>();
    m.outputs = digests_from(j.at("outputs"));
    m.version = j.at("version").get<std::string>();
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    return m;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("manifest is missing a field: ") + e.what());
  }
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read manifest '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_manifest(text);
}

}  // namespace invlab
