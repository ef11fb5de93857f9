#include <doctest.h>

#include <filesystem>

#include "floorset/bookshelf.hpp"
#include "floorset/dataset.hpp"
#include "floorset/lite.hpp"
#include "floorset/metrics.hpp"

using namespace floorset;

namespace {

LayoutInstance two_blocks() {
  LayoutInstance l;
  l.outline = {10, 10};
  l.partitions.emplace_back(0, partition_name(0), RectilinearPolygon::rectangle(0, 0, 5, 10));
  l.partitions.emplace_back(1, partition_name(1), RectilinearPolygon::rectangle(5, 0, 5, 10));
  l.terminals.push_back({0, terminal_name(0), {0.0, 5.0}});
  l.nets.push_back({NetKind::TerminalToBlock, 0, 1, 1.0});
  l.provenance = {3, 0, DatasetMode::Prime};
  return l;
}

const char* kGoldenBlocks =
    "FloorSet blocks 1.0\n"
    "Provenance : Prime 3 0\n"
    "Outline : 10 10\n"
    "NumHardRectilinearBlocks : 2\n"
    "NumSoftRectangularBlocks : 0\n"
    "NumTerminals : 1\n"
    "\n"
    "b0 hardrectilinear 4 (0,0) (5,0) (5,10) (0,10)\n"
    "b1 hardrectilinear 4 (5,0) (10,0) (10,10) (5,10)\n"
    "t0 terminal\n";

const char* kGoldenNets =
    "FloorSet nets 1.0\n"
    "NumNets : 1\n"
    "NumPins : 2\n"
    "\n"
    "NetDegree : 2 1\n"
    "t0 T\n"
    "b1 B\n";

const char* kGoldenPl =
    "FloorSet pl 1.0\n"
    "\n"
    "t0 0 5\n";

GenConfig config(DatasetMode mode, int lo, int hi, std::uint64_t seed) {
  GenConfig c;
  c.mode = mode;
  c.outline.width = {60, 200};
  c.outline.height = {60, 200};
  c.num_partitions = {lo, hi};
  c.seed = seed;
  return c;
}

LayoutInstance without_labels(LayoutInstance l) {
  l.labels.reset();
  return l;
}

int error_line(const BookshelfFiles& f) {
  try {
    parse_bookshelf(f);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("golden two-block instance") {
  const auto f = write_bookshelf(two_blocks());
  CHECK(f.blocks == kGoldenBlocks);
  CHECK(f.nets == kGoldenNets);
  CHECK(f.pl == kGoldenPl);
  CHECK(f.blocks.find("CONSTRAINT") == std::string::npos);
  CHECK(parse_bookshelf({kGoldenBlocks, kGoldenNets, kGoldenPl}) == two_blocks());
}

TEST_CASE("comments, blank lines and pin order are tolerated") {
  BookshelfFiles f{std::string("# header comment\n") + kGoldenBlocks + "\n# trailing\n",
                   "FloorSet nets 1.0\nNumNets : 1\nNumPins : 2\nNetDegree : 2 1 # weight\nb1 B\nt0 T\n",
                   "FloorSet pl 1.0\nt0   0   5\r\n"};
  // The leading comment is dropped, so the header is still the first line.
  CHECK(parse_bookshelf(f) == two_blocks());
}

TEST_CASE("L-shaped block and constraints") {
  LayoutInstance l;
  l.outline = {10, 10};
  l.partitions.emplace_back(0, partition_name(0),
                            RectilinearPolygon({{0, 0}, {10, 0}, {10, 4}, {4, 4}, {4, 10}, {0, 10}}));
  l.partitions.emplace_back(1, partition_name(1), RectilinearPolygon::rectangle(4, 4, 6, 6));
  l.nets.push_back({NetKind::BlockToBlock, 0, 1, 0.25});
  l.constraints.boundary[0] = kLeft | kBottom;
  l.constraints.preplaced[1] = {7.0, 7.0};
  l.constraints.shape_range[1] = {0.5, 2.0};
  l.constraints.clusters = {{0, 1}};
  l.provenance = {9, 4, DatasetMode::Prime};
  const auto f = write_bookshelf(l);
  CHECK(f.blocks.find("b0 hardrectilinear 6 (0,0) (10,0) (10,4) (4,4) (4,10) (0,10)\n") != std::string::npos);
  CHECK(f.blocks.find("CONSTRAINT shape b1 0.5 2\n") != std::string::npos);
  CHECK(f.blocks.find("CONSTRAINT boundary b0 LEFT,BOTTOM\n") != std::string::npos);
  CHECK(f.blocks.find("CONSTRAINT preplace b1 7 7\n") != std::string::npos);
  CHECK(f.blocks.find("CONSTRAINT cluster 0 b0 b1\n") != std::string::npos);
  CHECK(f.nets.find("NetDegree : 2 0.25\nb0 B\nb1 B\n") != std::string::npos);
  CHECK(parse_bookshelf(f) == l);
}

TEST_CASE("format_number round-trips") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(12.5) == "12.5");
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = uniform_real(rng, -1e6, 1e6);
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("round-trip generated Prime instances") {
  const auto c = config(DatasetMode::Prime, 3, 20, 41);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto r = generate_instance(c, TargetDistributions::defaults(), i);
    REQUIRE_MESSAGE(r.layout, r.error);
    const auto f = write_bookshelf(*r.layout);
    const auto back = parse_bookshelf(f);
    CHECK(back == without_labels(*r.layout));
    CHECK(write_bookshelf(back) == f);
    CHECK(compute_labels(back) == *r.layout->labels);
  }
}

TEST_CASE("round-trip generated Lite instances") {
  const auto c = config(DatasetMode::Lite, 5, 30, 42);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto r = generate_instance(c, TargetDistributions::defaults(), i);
    REQUIRE_MESSAGE(r.layout, r.error);
    const auto f = write_bookshelf(*r.layout);
    CHECK(f.blocks.find("hardrectilinear") == std::string::npos);
    const auto back = parse_bookshelf(f);
    CHECK(back == without_labels(*r.layout));
    CHECK(write_bookshelf(back) == f);
  }
}

TEST_CASE("save and load through files") {
  const auto dir = std::filesystem::temp_directory_path() / "floorset_bookshelf_test";
  std::filesystem::remove_all(dir);
  const auto f = write_bookshelf(two_blocks());
  save_bookshelf(f, dir, "case0");
  CHECK(std::filesystem::exists(dir / "case0.blocks"));
  CHECK(load_bookshelf(dir, "case0") == f);
  CHECK_THROWS(load_bookshelf(dir, "missing"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("parse errors") {
  const BookshelfFiles good{kGoldenBlocks, kGoldenNets, kGoldenPl};

  SUBCASE("net to an undeclared block") {
    auto f = good;
    f.nets = "FloorSet nets 1.0\nNumNets : 1\nNumPins : 2\nNetDegree : 2 1\nt0 T\nb7 B\n";
    try {
      parse_bookshelf(f);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.file() == "nets");
      CHECK(e.line() == 6);
      CHECK(e.column() == 1);
      CHECK(std::string(e.what()).find("b7") != std::string::npos);
    }
  }
  SUBCASE("duplicate NumNets") {
    auto f = good;
    f.nets = "FloorSet nets 1.0\nNumNets : 1\nNumNets : 1\nNumPins : 2\nNetDegree : 2 1\nt0 T\nb1 B\n";
    CHECK(error_line(f) == 3);
  }
  SUBCASE("duplicate Outline") {
    auto f = good;
    f.blocks = std::string(kGoldenBlocks) + "Outline : 10 10\n";
    CHECK(error_line(f) == 11);
  }
  SUBCASE("block count mismatch") {
    auto f = good;
    f.blocks.replace(f.blocks.find("NumHardRectilinearBlocks : 2"), 28, "NumHardRectilinearBlocks : 3");
    CHECK(error_line(f) == 4);
  }
  SUBCASE("bad header") {
    auto f = good;
    f.pl = "FloorSet pl 2.0\nt0 0 5\n";
    CHECK(error_line(f) == 1);
  }
  SUBCASE("terminal off the perimeter") {
    auto f = good;
    f.pl = "FloorSet pl 1.0\nt0 3 5\n";
    CHECK(error_line(f) == 2);
  }
  SUBCASE("missing terminal placement") {
    auto f = good;
    f.pl = "FloorSet pl 1.0\n";
    CHECK_THROWS_AS(parse_bookshelf(f), ParseError);
  }
  SUBCASE("bad vertex") {
    auto f = good;
    f.blocks.replace(f.blocks.find("(5,10) (0,10)"), 13, "(5,10) (0,1x)");
    CHECK(error_line(f) == 8);
  }
  SUBCASE("non-rectilinear polygon") {
    auto f = good;
    f.blocks.replace(f.blocks.find("(5,10) (0,10)"), 13, "(5,10) (1,10)");
    CHECK(error_line(f) == 8);
  }
  SUBCASE("overlapping blocks") {
    auto f = good;
    f.blocks.replace(f.blocks.find("b1 hardrectilinear 4 (5,0)"), 26, "b1 hardrectilinear 4 (4,0)");
    f.blocks.replace(f.blocks.find("(5,10)\nt0"), 10, "(4,10)\nt0");
    CHECK_THROWS_AS(parse_bookshelf(f), ParseError);
  }
  SUBCASE("unsupported net degree") {
    auto f = good;
    f.nets = "FloorSet nets 1.0\nNumNets : 1\nNumPins : 3\nNetDegree : 3 1\nt0 T\nb1 B\nb0 B\n";
    CHECK(error_line(f) == 4);
  }
  SUBCASE("soft block area mismatch") {
    auto f = good;
    f.blocks =
        "FloorSet blocks 1.0\nProvenance : Lite 1 0\nOutline : 10 10\nNumHardRectilinearBlocks : 0\n"
        "NumSoftRectangularBlocks : 1\nNumTerminals : 0\nb0 softrectangular 100 0.5 2\n";
    f.nets = "FloorSet nets 1.0\nNumNets : 0\nNumPins : 0\n";
    f.pl = "FloorSet pl 1.0\nb0 0 0 10 9\n";
    CHECK(error_line(f) == 2);
    f.pl = "FloorSet pl 1.0\nb0 0 0 10 10\n";
    const auto l = parse_bookshelf(f);
    CHECK(l.partitions.at(0).area == 100);
    CHECK(l.constraints.shape_range.at(0) == AspectRange{0.5, 2.0});
  }
}

TEST_CASE("dataset container round-trip") {
  Dataset d;
  d.mode = DatasetMode::Lite;
  const auto c = config(DatasetMode::Lite, 5, 15, 8);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto r = generate_instance(c, TargetDistributions::defaults(), i);
    REQUIRE(r.layout);
    REQUIRE(r.layout->labels);
    d.instances.push_back(*r.layout);
  }
  const std::string text = write_dataset(d);
  CHECK(text.rfind("floorset-data v1\nmode Lite\ncount 10\n", 0) == 0);
  CHECK(read_dataset(text) == d);
  CHECK(write_dataset(read_dataset(text)) == text);

  const auto path = std::filesystem::temp_directory_path() / "floorset_dataset_test" / "d.fsd";
  save_dataset(d, path);
  CHECK(load_dataset(path) == d);
  std::filesystem::remove_all(path.parent_path());

  SUBCASE("empty") {
    const Dataset e{DatasetMode::Prime, {}};
    CHECK(write_dataset(e) == "floorset-data v1\nmode Prime\ncount 0\nend\n");
    CHECK(read_dataset(write_dataset(e)) == e);
  }
  SUBCASE("unsupported version") {
    std::string old = text;
    old.replace(0, 16, "floorset-data v0");
    try {
      read_dataset(old);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
  }
  SUBCASE("truncated") {
    for (std::size_t cut : {text.size() - 1, text.size() - 5, text.size() / 2, std::size_t{30}}) {
      CHECK_THROWS_AS(read_dataset(text.substr(0, cut)), ParseError);
    }
  }
  SUBCASE("corrupt record") {
    std::string bad = text;
    bad[bad.find("\"outline\"") + 1] = 'X';
    CHECK_THROWS_AS(read_dataset(bad), ParseError);
  }
}
