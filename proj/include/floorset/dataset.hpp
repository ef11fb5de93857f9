#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "floorset/bookshelf.hpp"
#include "floorset/layout.hpp"

namespace floorset {

/// Container text layout:
///   floorset-data v1
///   mode <Prime|Lite>
///   count <N>
///   record <nbytes>        (N times, followed by nbytes of JSON and '\n')
///   end
inline constexpr const char* kDatasetMagic = "floorset-data";
inline constexpr int kDatasetVersion = 1;

struct Dataset {
  DatasetMode mode = DatasetMode::Prime;
  std::vector<LayoutInstance> instances;
  bool operator==(const Dataset&) const = default;
};

nlohmann::json layout_to_json(const LayoutInstance& layout);
/// Throws std::invalid_argument on missing fields or structural errors.
LayoutInstance layout_from_json(const nlohmann::json& j);

/// Byte-deterministic for equal input.
std::string write_dataset(const Dataset& data);
/// Throws ParseError (file "dataset") for bad headers, unsupported
/// versions, truncation and malformed records.
Dataset read_dataset(const std::string& text);

void save_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace floorset
