#include "service/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "common/error.hpp"

namespace mocg::service {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::Internal, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

[[noreturn]] void io_fail(const std::string& what, const fs::path& path) {
  fail(ErrorCode::Io, what + " " + path.string() + ": " + std::strerror(errno), {{"path", path.string()}});
}

void fsync_path(const fs::path& path, int flags) {
  int fd = ::open(path.c_str(), flags);
  if (fd < 0) io_fail("cannot open", path);
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_fail("fsync failed for", path);
  }
  ::close(fd);
}

std::uint64_t suffix_number(const std::string& stem) {
  auto dash = stem.rfind('-');
  if (dash == std::string::npos) return 0;
  try {
    return std::stoull(stem.substr(dash + 1));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

void write_atomic(const fs::path& path, std::string_view bytes) {
  static std::atomic<std::uint64_t> serial{0};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid()) + "-" + std::to_string(serial++);
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) io_fail("cannot create", tmp);
  std::size_t done = 0;
  while (done < bytes.size()) {
    ssize_t w = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (w < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      io_fail("write failed for", tmp);
    }
    done += static_cast<std::size_t>(w);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_fail("fsync failed for", tmp);
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) io_fail("rename failed for", path);
  fsync_path(path.parent_path(), O_RDONLY | O_DIRECTORY);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string(), {{"path", path.string()}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* id_prefix(Kind kind) {
  switch (kind) {
    case Kind::Job: return "job";
    case Kind::Graph: return "g";
    case Kind::History: return "h";
  }
  return "x";
}

bool valid_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; });
}

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  for (const auto& d : {datasets_dir(), dir(Kind::Job), dir(Kind::Graph), dir(Kind::History)}) {
    fs::create_directories(d, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + d.string() + ": " + ec.message(), {{"path", d.string()}});
  }
  for (auto kind : {Kind::Job, Kind::Graph, Kind::History}) {
    std::uint64_t top = 0;
    for (const auto& entry : fs::directory_iterator(dir(kind))) {
      if (entry.path().extension() != ".json") continue;
      top = std::max(top, suffix_number(entry.path().stem().string()));
    }
    counters_[kind] = top;
  }
}

fs::path Store::dir(Kind kind) const {
  switch (kind) {
    case Kind::Job: return root_ / "jobs";
    case Kind::Graph: return root_ / "graphs";
    case Kind::History: return root_ / "history";
  }
  return root_;
}

std::string Store::put_dataset(std::string_view csv) {
  std::string id = "ds-" + sha256_hex(csv).substr(0, 12);
  auto path = datasets_dir() / (id + ".csv");
  std::lock_guard lock(mu_);
  if (!fs::exists(path)) write_atomic(path, csv);
  return id;
}

std::optional<std::string> Store::dataset_csv(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  auto path = datasets_dir() / (id + ".csv");
  if (!fs::exists(path)) return std::nullopt;
  return read_file(path);
}

std::string Store::next_id(Kind kind) {
  std::lock_guard lock(mu_);
  return std::string(id_prefix(kind)) + "-" + std::to_string(++counters_[kind]);
}

void Store::put(Kind kind, const std::string& id, const nlohmann::json& doc) {
  if (!valid_id(id)) fail(ErrorCode::InvalidArgument, "invalid id '" + id + "'");
  write_atomic(dir(kind) / (id + ".json"), doc.dump());
}

std::optional<nlohmann::json> Store::get(Kind kind, const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  auto path = dir(kind) / (id + ".json");
  if (!fs::exists(path)) return std::nullopt;
  return nlohmann::json::parse(read_file(path));
}

std::vector<nlohmann::json> Store::list(Kind kind) const {
  std::vector<std::pair<std::uint64_t, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir(kind)))
    if (entry.path().extension() == ".json") files.emplace_back(suffix_number(entry.path().stem().string()), entry.path());
  std::sort(files.begin(), files.end());
  std::vector<nlohmann::json> out;
  for (const auto& [_, path] : files) out.push_back(nlohmann::json::parse(read_file(path)));
  return out;
}

}  // namespace mocg::service
