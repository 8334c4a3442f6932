#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "hopt/error.hpp"
#include "hopt/kernels.hpp"
#include "output.hpp"

#ifndef HOPT_VERSION
#define HOPT_VERSION "unknown"
#endif

namespace hopt {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error(ErrorKind::IoError, "SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

namespace detail {

EmittedFile write_output(const std::filesystem::path& dir, const std::string& name,
                         const std::string& content) {
  const auto final_path = dir / name;
  const auto tmp_path = dir / (name + ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp_path.string());
    out << content;
    if (!out.flush()) throw Error(ErrorKind::IoError, "short write to " + tmp_path.string());
  }
  std::filesystem::rename(tmp_path, final_path);
  return {name, sha256_hex(content)};
}

void write_manifest(const std::filesystem::path& path, const std::string& experiment,
                    const ExperimentConfig& cfg, const std::vector<EmittedFile>& files,
                    double wall_seconds) {
  std::ostringstream m;
  m << "experiment=" << experiment << '\n';
  m << "config_hash=" << cfg.hash(experiment) << '\n';
  m << "version=" << HOPT_VERSION << '\n';
  m << "simd_backend=" << simd::backend_name(simd::active_backend()) << '\n';
  m << "seeds=" << cfg.get("seeds") << '\n';
  m << "wall_clock_seconds=" << std::fixed << std::setprecision(3) << wall_seconds << '\n';
  for (const auto& [k, v] : cfg.values()) m << "config." << k << '=' << v << '\n';
  for (const auto& f : files) m << "file." << f.name << '=' << f.sha256 << '\n';
  const auto dir = path.parent_path();
  write_output(dir, path.filename().string(), m.str());
}

}  // namespace detail
}  // namespace hopt
