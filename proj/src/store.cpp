#include "iris/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "iris/error.hpp"

namespace iris {

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void le(T value) {
    using U = std::make_unsigned_t<T>;
    const auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::span<const std::uint8_t> bytes(std::size_t n) {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::TruncatedData, "template store ends mid-record");
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <typename T>
  T le() {
    using U = std::make_unsigned_t<T>;
    const auto s = bytes(sizeof(T));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u = static_cast<U>(u | (static_cast<U>(s[i]) << (8 * i)));
    return static_cast<T>(u);
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// flock-based lock on a sibling ".lock" file; the store itself is replaced by rename.
class FileLock {
 public:
  FileLock(const std::filesystem::path& db, bool exclusive) {
    const auto lock_path = db.string() + ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::IoFailure, "cannot open lock file " + lock_path);
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::IoFailure, "cannot lock " + lock_path);
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::vector<TemplateRecord> read_unlocked(const std::filesystem::path& db) {
  std::ifstream in(db, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(db)) return {};
    throw Error(ErrorCode::IoFailure, "cannot read " + db.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_store(bytes);
}

void write_durable(const std::filesystem::path& db, const std::vector<std::uint8_t>& bytes) {
  const auto tmp = db.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::IoFailure, "cannot create " + tmp);
  std::size_t written = 0;
  while (written < bytes.size()) {
    const auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n <= 0) {
      ::close(fd);
      throw Error(ErrorCode::IoFailure, "write failed for " + tmp);
    }
    written += static_cast<std::size_t>(n);
  }
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (!synced || std::rename(tmp.c_str(), db.c_str()) != 0) {
    throw Error(ErrorCode::IoFailure, "cannot move " + tmp + " into place");
  }
}

}  // namespace

std::vector<std::uint8_t> serialize_store(std::span<const TemplateRecord> records) {
  Writer w;
  w.bytes("IRDB", 4);
  w.le<std::uint8_t>(kStoreVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    if (r.subject_id.empty() || r.subject_id.size() > 0xFFFF) {
      throw Error(ErrorCode::InvalidArgument, "subject id must have 1..65535 bytes");
    }
    w.le<std::uint16_t>(static_cast<std::uint16_t>(r.subject_id.size()));
    w.bytes(r.subject_id.data(), r.subject_id.size());
    w.le<std::int64_t>(r.created_at);
    for (const auto* c : {&r.boundaries.pupil, &r.boundaries.limbic}) {
      w.f64(c->cx);
      w.f64(c->cy);
      w.f64(c->r);
    }
    w.le<std::uint16_t>(static_cast<std::uint16_t>(r.code.strip_rows));
    w.le<std::uint16_t>(static_cast<std::uint16_t>(r.code.strip_cols));
    const auto packed = pack_code(r.code);
    w.bytes(packed.data(), packed.size());
  }
  return w.take();
}

std::vector<TemplateRecord> parse_store(std::span<const std::uint8_t> bytes) {
  Reader rd(bytes);
  const auto magic = rd.bytes(4);
  if (std::memcmp(magic.data(), "IRDB", 4) != 0) throw Error(ErrorCode::MalformedHeader, "not an IRDB store");
  const auto version = rd.le<std::uint8_t>();
  if (version != kStoreVersion) throw Error(ErrorCode::MalformedHeader, "unsupported IRDB version " + std::to_string(version));
  const auto count = rd.le<std::uint32_t>();
  std::vector<TemplateRecord> records;
  for (std::uint32_t i = 0; i < count; ++i) {
    TemplateRecord r;
    const auto id_len = rd.le<std::uint16_t>();
    const auto id = rd.bytes(id_len);
    r.subject_id.assign(id.begin(), id.end());
    r.created_at = rd.le<std::int64_t>();
    for (auto* c : {&r.boundaries.pupil, &r.boundaries.limbic}) {
      c->cx = rd.f64();
      c->cy = rd.f64();
      c->r = rd.f64();
    }
    const int rows = rd.le<std::uint16_t>();
    const int cols = rd.le<std::uint16_t>();
    r.code = unpack_code(rd.bytes(2 * kCodeBytes));
    r.code.strip_rows = rows;
    r.code.strip_cols = cols;
    records.push_back(std::move(r));
  }
  if (!rd.done()) throw Error(ErrorCode::MalformedHeader, "trailing bytes after last record");
  return records;
}

std::vector<TemplateRecord> load_store(const std::filesystem::path& db) {
  FileLock lock(db, false);
  return read_unlocked(db);
}

void enroll(const std::filesystem::path& db, const TemplateRecord& record, bool overwrite) {
  if (record.subject_id.empty()) throw Error(ErrorCode::InvalidArgument, "subject id must be non-empty");
  FileLock lock(db, true);
  auto records = read_unlocked(db);
  const auto it = std::find_if(records.begin(), records.end(),
                               [&](const TemplateRecord& r) { return r.subject_id == record.subject_id; });
  if (it != records.end()) {
    if (!overwrite) throw Error(ErrorCode::DuplicateId, "subject '" + record.subject_id + "' already enrolled");
    *it = record;
  } else {
    records.push_back(record);
  }
  write_durable(db, serialize_store(records));
}

MatchResult verify(const std::filesystem::path& db, const std::string& subject_id, const NormalizedIris& probe,
                   const MatchOptions& options) {
  const auto records = load_store(db);
  const auto it = std::find_if(records.begin(), records.end(),
                               [&](const TemplateRecord& r) { return r.subject_id == subject_id; });
  if (it == records.end()) throw Error(ErrorCode::UnknownSubject, "subject '" + subject_id + "' is not enrolled");
  return match_with_shifts(probe, it->code, options);
}

std::vector<std::pair<std::string, MatchResult>> identify(std::span<const TemplateRecord> records,
                                                          const NormalizedIris& probe, const MatchOptions& options) {
  if (records.empty()) throw Error(ErrorCode::EmptyStore, "template store is empty");
  std::vector<std::pair<std::string, MatchResult>> ranked;
  for (const auto& r : records) {
    try {
      ranked.emplace_back(r.subject_id, match_with_shifts(probe, r.code, options));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientOverlap) throw;
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.hd != b.second.hd) return a.second.hd < b.second.hd;
    return a.first < b.first;
  });
  return ranked;
}

std::vector<std::pair<std::string, MatchResult>> identify(const std::filesystem::path& db, const NormalizedIris& probe,
                                                          const MatchOptions& options) {
  const auto records = load_store(db);
  return identify(records, probe, options);
}

}  // namespace iris
