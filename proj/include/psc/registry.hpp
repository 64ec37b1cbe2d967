// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "psc/analysis.hpp"
#include "psc/model.hpp"

namespace psc {

enum class RecordFormat { Csv, Jsonl };

/// Pick a format from a file name: .csv -> Csv, everything else -> Jsonl.
RecordFormat format_for_path(const std::filesystem::path& path);

/// One record per CSV row / JSON line. Unknown columns are preserved as
/// opaque metadata; every returned record passes validate_record.
std::vector<AttackRecord> parse_records(std::string_view text, RecordFormat format);

std::string serialize_records(std::span<const AttackRecord> records, RecordFormat format);

// --- JSON codecs (canonical: sorted keys, shortest round-trip numbers) -----

nlohmann::json record_to_json(const AttackRecord& record);
AttackRecord record_from_json(const nlohmann::json& j);

nlohmann::json spec_to_json(const ComparisonSpec& spec);
ComparisonSpec spec_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const ComparisonReport& report);
ComparisonReport report_from_json(const nlohmann::json& j);

/// Stable content hash of the canonical spec serialization; invariant under
/// field reordering and equivalent numeric spellings.
std::string spec_digest(const ComparisonSpec& spec);

// --- On-disk store ----------------------------------------------------------

struct Provenance {
  std::string submitter;
  std::int64_t timestamp = 0;  // UTC seconds
  std::string note;
};

struct RegistryKey {
  RunContext context;
  ComparisonSpec spec;
  std::string digest;

  static RegistryKey make(RunContext context, ComparisonSpec spec);
};

struct RegistryEntry {
  RegistryKey key;
  std::string method;
  std::vector<AttackRecord> records;
  Provenance provenance;
};

/// Fault-injection points for crash tests; unset in normal operation.
struct WriteHooks {
  std::function<void()> after_temp_write;
};

/// Atomically stores the entry under root/<context>/<digest>/<method>.jsonl
/// (write-temp-then-rename). Re-adding a method archives the previous live
/// file. Writers serialize on a per-key advisory lock; readers never lock.
std::filesystem::path registry_add(const std::filesystem::path& root, const RegistryEntry& entry,
                                   const WriteHooks& hooks = {});

struct ListedEntry {
  RunContext context;
  std::string digest;
  std::string method;
  std::size_t record_count = 0;
  Provenance provenance;
  std::filesystem::path path;
};

std::vector<ListedEntry> registry_list(const std::filesystem::path& root);

/// All live entries stored under the key, with their records.
std::vector<RegistryEntry> registry_load(const std::filesystem::path& root,
                                         const RegistryKey& key);

/// Merges the stored baselines with the uploaded records and runs the full
/// comparison under the stored spec. With no baselines the report degrades to
/// the uploaded method alone and says so in its advisories.
ComparisonReport registry_compare(const std::filesystem::path& root, const RegistryKey& key,
                                  std::span<const AttackRecord> uploaded,
                                  const std::string& uploaded_method);

}  // namespace psc
