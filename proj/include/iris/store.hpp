#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iris/encode.hpp"
#include "iris/matching.hpp"
#include "iris/types.hpp"

namespace iris {

struct TemplateRecord {
  std::string subject_id;
  IrisCode code;
  Boundaries boundaries;
  std::int64_t created_at = 0;  // seconds since epoch

  friend bool operator==(const TemplateRecord&, const TemplateRecord&) = default;
};

// IRDB layout, all integers little-endian:
//   "IRDB" | u8 version=1 | u32 count | records...
//   record: u16 id_len | id | i64 created_at | 6 x f64 (pupil cx,cy,r, limbic cx,cy,r)
//           | u16 strip_rows | u16 strip_cols | 256 code bytes | 256 mask bytes
inline constexpr std::uint8_t kStoreVersion = 1;

std::vector<std::uint8_t> serialize_store(std::span<const TemplateRecord> records);
std::vector<TemplateRecord> parse_store(std::span<const std::uint8_t> bytes);

/// Missing file reads as an empty store. Takes a shared lock.
std::vector<TemplateRecord> load_store(const std::filesystem::path& db);

/// Adds or (with overwrite) replaces the record keyed by subject_id. The
/// store is rewritten under an exclusive lock and renamed into place.
void enroll(const std::filesystem::path& db, const TemplateRecord& record, bool overwrite = false);

MatchResult verify(const std::filesystem::path& db, const std::string& subject_id, const NormalizedIris& probe,
                   const MatchOptions& options = {});

/// Linear scan, ascending by distance, ties by subject_id. Templates without
/// enough overlap at any shift are left out.
std::vector<std::pair<std::string, MatchResult>> identify(const std::filesystem::path& db, const NormalizedIris& probe,
                                                          const MatchOptions& options = {});
std::vector<std::pair<std::string, MatchResult>> identify(std::span<const TemplateRecord> records,
                                                          const NormalizedIris& probe, const MatchOptions& options = {});

}  // namespace iris
