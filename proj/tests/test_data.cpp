// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "test_support.hpp"
#include "visir/data/dataset.hpp"
#include "visir/data/io.hpp"
#include "visir/data/resample.hpp"
#include "visir/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace visir {
namespace {

namespace fs = std::filesystem;
using testing::random_image;

class TempDir : public ::testing::Test {
 protected:
  fs::path dir;
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("visir_data_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TEST(NormalizeField, AffineMap) {
  const auto n = data::normalize_field({1, 3, {250.0, 310.0, 280.0}, "K"});
  EXPECT_EQ(n.channel.pixels, (std::vector<double>{0.0, 1.0, 0.5}));
  EXPECT_EQ(n.range, (data::NormalizationRange{250.0, 310.0}));
  const std::vector<double> unit{0.0, 0.3, 1.0, 0.7};
  EXPECT_EQ(data::normalize_field({2, 2, unit, ""}).channel.pixels, unit);
  EXPECT_THROW(data::normalize_field({1, 2, {4.0, 4.0}, ""}), ContractError);
  EXPECT_THROW(data::normalize_field({1, 2, {4.0, std::nan("")}, ""}), NonFiniteError);
}

TEST(NormalizeField, ExtremesExact) {
  data::FieldGrid f{7, 9, testing::random_values(63, 5, -40.0, 900.0), ""};
  const auto n = data::normalize_field(f);
  EXPECT_EQ(*std::min_element(n.channel.pixels.begin(), n.channel.pixels.end()), 0.0);
  EXPECT_EQ(*std::max_element(n.channel.pixels.begin(), n.channel.pixels.end()), 1.0);
}

TEST(AssembleRgb, OrderAndInverse) {
  const Image r(3, 2, 1, 0.0), g(3, 2, 1, 0.5), b(3, 2, 1, 1.0);
  const Image rgb = data::assemble_rgb(r, g, b);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(rgb.pixels[3 * i], 0.0);
    EXPECT_EQ(rgb.pixels[3 * i + 1], 0.5);
    EXPECT_EQ(rgb.pixels[3 * i + 2], 1.0);
  }
  const Image t = random_image(4, 5, 1, 1), s = random_image(4, 5, 1, 2), l = random_image(4, 5, 1, 3);
  const Image stacked = data::assemble_rgb(t, s, l);
  EXPECT_EQ(data::extract_channel(stacked, 0), t);
  EXPECT_EQ(data::extract_channel(stacked, 1), s);
  EXPECT_EQ(data::extract_channel(stacked, 2), l);
  const Image swapped = data::assemble_rgb(s, t, l);
  EXPECT_EQ(data::extract_channel(swapped, 0), s);
  EXPECT_EQ(data::extract_channel(swapped, 1), t);
  EXPECT_THROW(data::assemble_rgb(t, Image(4, 4, 1), l), DimensionError);
}

TEST(TileImage, FullSourceCounts) {
  EXPECT_EQ(data::tile_image(Image(720, 1440, 1), 240, 240).size(), 18u);
  EXPECT_EQ(data::tile_image(Image(180, 360, 1), 60, 60).size(), 18u);
  EXPECT_THROW(data::tile_image(Image(100, 100, 1), 33, 33), TilingError);
}

TEST(TileImage, ReassemblyIsIdentity) {
  const Image img = random_image(12, 18, 3, 4);
  const auto tiles = data::tile_image(img, 4, 6);
  ASSERT_EQ(tiles.size(), 9u);
  EXPECT_EQ(tiles[1].at(0, 0, 2), img.at(0, 6, 2));
  EXPECT_EQ(tiles[3].at(1, 2, 0), img.at(5, 2, 0));
  EXPECT_EQ(data::untile_image(tiles, 3, 3), img);
}

TEST(Bicubic, ConstantsAndShape) {
  for (double v : {0.0, 0.37, 1.0, 1.0 / 3.0}) {
    const Image out = data::bicubic_downsample(Image(240, 240, 3, v), 4);
    EXPECT_EQ(out.height, 60u);
    EXPECT_EQ(out.width, 60u);
    for (double p : out.pixels) EXPECT_EQ(p, v);
  }
}

TEST(Bicubic, RampMatchesLine) {
  const std::size_t w = 64, s = 4;
  Image ramp(8, w, 1);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < w; ++x) ramp.at(y, x, 0) = static_cast<double>(x) / (w - 1);
  const Image out = data::bicubic_downsample(ramp, s);
  for (std::size_t y = 0; y < out.height; ++y)
    for (std::size_t j = 1; j + 1 < out.width; ++j) {
      const double centre = (static_cast<double>(j) + 0.5) * s - 0.5;
      EXPECT_NEAR(out.at(y, j, 0), centre / (w - 1), 1e-6) << j;
    }
}

TEST(Bicubic, StaysInUnitRange) {
  Image checker(32, 32, 1);
  for (std::size_t y = 0; y < 32; ++y)
    for (std::size_t x = 0; x < 32; ++x) checker.at(y, x, 0) = ((x / 2 + y / 3) % 2) ? 1.0 : 0.0;
  for (double v : data::bicubic_downsample(checker, 2).pixels) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_THROW(data::bicubic_downsample(Image(10, 10, 1), 4), TilingError);
}

TEST(Bicubic, SerialAndParallelIdentical) {
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
#endif
  const Image img = random_image(96, 80, 3, 8);
  EXPECT_EQ(data::serial::bicubic_downsample(img, 4), data::parallel::bicubic_downsample(img, 4));
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
}

TEST(SynthField, ConstantAndDeterministic) {
  data::SpectrumSpec flat{{{1.0, 0.0, 0.0}}, std::nullopt};
  const auto f = data::synth_field(3, 5, 6, flat);
  for (double v : f.values) EXPECT_EQ(v, f.values[0]);
  const auto spec = data::DatasetConfig::default_spectrum();
  EXPECT_EQ(data::synth_field(9, 16, 32, spec).values, data::synth_field(9, 16, 32, spec).values);
  EXPECT_NE(data::synth_field(9, 16, 32, spec).values, data::synth_field(10, 16, 32, spec).values);
  EXPECT_THROW(data::synth_field(1, 4, 4, {}), ContractError);
}

TEST(SynthField, DftPeakAtRequestedFrequency) {
  const std::size_t n = 64;
  for (double freq : {3.0, 5.0, 17.0}) {
    const auto f = data::synth_field(4, n, n, {{{1.0, freq, 0.0}}, std::nullopt});
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k <= n / 2; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t x = 0; x < n; ++x)
        acc += f.values[7 * n + x] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * x) / double(n));
      if (std::abs(acc) > best_mag) {
        best_mag = std::abs(acc);
        best = k;
      }
    }
    EXPECT_EQ(best, static_cast<std::size_t>(freq));
  }
}

TEST(MakePairs, DimensionsAndIds) {
  const auto pairs = data::make_pairs(random_image(720, 1440, 3, 1), 240, 240, 4, "s0");
  ASSERT_EQ(pairs.size(), 18u);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.hr.height, 240u);
    EXPECT_EQ(p.lr.height, 60u);
    EXPECT_EQ(p.lr.width, 60u);
    EXPECT_EQ(p.hr.height, p.scale * p.lr.height);
  }
  EXPECT_NE(pairs[0].id, pairs[1].id);
}

TEST(DatasetConfig, ValidationNamesKey) {
  data::DatasetConfig c;
  c.tile_height = 250;
  try {
    c.validate();
    FAIL() << "expected ContractError";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("tile_height"), std::string::npos) << e.what();
  }
  c = {};
  c.num_sources = 0;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(AssignSplits, DeterministicFraction) {
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  for (std::size_t s = 0; s < 10; ++s)
    for (std::size_t t = 0; t < 18; ++t) keys.emplace_back(s, t);
  const auto a = data::assign_splits(keys, 5, 0.8), b = data::assign_splits(keys, 5, 0.8);
  EXPECT_EQ(a, b);
  EXPECT_EQ(std::count(a.begin(), a.end(), "train"), 144);
  EXPECT_NE(a, data::assign_splits(keys, 6, 0.8));
}

data::DatasetConfig small_dataset() {
  data::DatasetConfig c;
  c.num_sources = 3;
  c.source_height = 32;
  c.source_width = 64;
  c.tile_height = 16;
  c.tile_width = 16;
  c.scale = 4;
  c.seed = 12;
  return c;
}

using Dataset = TempDir;

TEST_F(Dataset, BuildIsByteIdenticalAndLoads) {
  const auto m = data::build_dataset(small_dataset(), dir / "a");
  data::build_dataset(small_dataset(), dir / "b");
  EXPECT_EQ(m.pairs.size(), 24u);
  EXPECT_EQ(slurp(dir / "a" / data::kManifestName), slurp(dir / "b" / data::kManifestName));
  for (const auto& p : m.pairs) EXPECT_EQ(slurp(dir / "a" / p.hr_path), slurp(dir / "b" / p.hr_path));

  const auto loaded = data::load_manifest(dir / "a" / data::kManifestName);
  EXPECT_EQ(loaded.to_json(), m.to_json());
  const auto train = data::load_pairs(loaded, dir / "a", "train");
  const auto test = data::load_pairs(loaded, dir / "a", "test");
  EXPECT_EQ(train.size() + test.size(), 24u);
  EXPECT_EQ(train.size(), 19u);
  for (const auto& p : train) {
    EXPECT_EQ(p.hr.height, 16u);
    EXPECT_EQ(p.lr.height, 4u);
    EXPECT_EQ(p.lr, data::bicubic_downsample(p.hr, 4));
  }
}

TEST_F(Dataset, EmptySourceListThrows) {
  data::DatasetConfig c = small_dataset();
  c.num_sources = 0;
  EXPECT_THROW(data::build_dataset(c, dir), ContractError);
}

TEST_F(Dataset, SourceFilesReplaceSynthesis) {
  Image grid = random_image(32, 64, 3, 3);
  for (double& v : grid.pixels) v = 200.0 + 100.0 * v;
  data::write_grid((dir / "src.vsgr").string(), grid, "K");
  data::DatasetConfig c = small_dataset();
  c.source_files = {(dir / "src.vsgr").string()};
  const auto m = data::build_dataset(c, dir / "out");
  EXPECT_EQ(m.pairs.size(), 8u);
  ASSERT_EQ(m.sources.size(), 1u);
  EXPECT_GE(m.sources[0].ranges[0].min, 200.0);
}

using GridIo = TempDir;

TEST_F(GridIo, RawRoundTripAndErrors) {
  const Image img = random_image(5, 7, 3, 2);
  const std::string path = (dir / "g.vsgr").string();
  data::write_grid(path, img, "W m-2");
  const auto back = data::read_grid(path);
  EXPECT_EQ(back.data, img);
  EXPECT_EQ(back.units, "W m-2");
  const auto fields = data::grid_fields(back);
  ASSERT_EQ(fields.size(), 3u);
  EXPECT_EQ(fields[1].values[0], img.at(0, 0, 1));

  std::string bytes = slurp(path);
  std::ofstream(dir / "short.vsgr", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  EXPECT_THROW(data::read_grid((dir / "short.vsgr").string()), FormatError);
  bytes[1] = 'Q';
  std::ofstream(dir / "magic.vsgr", std::ios::binary) << bytes;
  EXPECT_THROW(data::read_grid((dir / "magic.vsgr").string()), FormatError);
  EXPECT_THROW(data::read_grid((dir / "none.vsgr").string()), IoError);
}

TEST_F(GridIo, PngQuantisation) {
  EXPECT_EQ(data::to_byte(0.0), 0);
  EXPECT_EQ(data::to_byte(1.0), 255);
  EXPECT_EQ(data::to_byte(0.5), 128);
  EXPECT_EQ(data::to_byte(-3.0), 0);
  EXPECT_EQ(data::to_byte(7.0), 255);
  const Image img = random_image(6, 9, 3, 1);
  const std::string path = (dir / "x.png").string();
  data::write_png(path, img);
  const Image back = data::read_image(path);
  ASSERT_TRUE(back.same_shape(img));
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(back.pixels[i], img.pixels[i], 0.5 / 255 + 1e-12);
  const Image grey = random_image(4, 4, 1, 2);
  data::write_png(path, grey);
  EXPECT_EQ(data::read_png(path).channels, 1u);
}

}  // namespace
}  // namespace visir
