#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "floorset/layout.hpp"

namespace floorset {

/// Syntax or semantic error in a Bookshelf or container file. `line` and
/// `column` are 1-based; 0 when the error is not tied to a position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, int column, const std::string& message);
  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string file_;
  int line_;
  int column_;
};

struct BookshelfFiles {
  std::string blocks;
  std::string nets;
  std::string pl;
  bool operator==(const BookshelfFiles&) const = default;
};

/// Canonical text: fixed ordering by id, shortest round-trip numbers.
/// Rectangular partitions of a Lite instance that carry a shape range are
/// written as soft rectangles with their placement in the .pl file; every
/// other partition is a hard rectilinear block.
BookshelfFiles write_bookshelf(const LayoutInstance& layout);

/// Inverse of write_bookshelf; labels are left empty.
LayoutInstance parse_bookshelf(const BookshelfFiles& files);

/// <dir>/<stem>.blocks, .nets, .pl
void save_bookshelf(const BookshelfFiles& files, const std::filesystem::path& dir, const std::string& stem);
BookshelfFiles load_bookshelf(const std::filesystem::path& dir, const std::string& stem);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

}  // namespace floorset
