#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <thread>

#include "oracles.hpp"
#include "support.hpp"
#include "tensorbio/biodiv.hpp"

namespace {

using namespace tensorbio;
using tbtest::Rng;

double euclid(double a, double b) { return std::abs(a - b); }
double discrete(double a, double b) { return a == b ? 0.0 : 1.0; }

bool same_bits(const Raster& a, const Raster& b) {
  return a.size() == b.size() &&
         std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

TEST(Window, Validation) {
  EXPECT_THROW((WindowSpec{4}.validate()), std::invalid_argument);
  EXPECT_THROW((WindowSpec{1}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((WindowSpec{3}.validate()));
  EXPECT_EQ(WindowSpec{}.side, 11u);
  EXPECT_EQ(WindowSpec{}.half(), 5u);
  EXPECT_EQ(WindowSpec{}.border, Border::InteriorMissing);
}

TEST(Window, Abundances) {
  const Raster r(3, 3, {1, 4, 1, 4, -3000, 4, 1, 1, std::nan("")});
  const auto t = window_abundances(r, 1, 1, {3});
  EXPECT_EQ(t.labels, (std::vector<double>{1, 4}));
  EXPECT_EQ(t.counts, (std::vector<std::size_t>{4, 3}));
  EXPECT_EQ(t.total, 7u);
  EXPECT_THROW(window_abundances(r, 0, 0, {3}), std::invalid_argument);

  const auto corner = window_abundances(r, 0, 0, {3, Border::Shrink});
  EXPECT_EQ(corner.labels, (std::vector<double>{1, 4}));
  EXPECT_EQ(corner.counts, (std::vector<std::size_t>{1, 2}));
  EXPECT_THROW(window_abundances(r, 3, 0, {3, Border::Shrink}), std::invalid_argument);
}

TEST(Indices, SpotValues) {
  // 121 distinct values.
  Raster distinct(11, 11);
  for (std::size_t i = 0; i < distinct.size(); ++i) distinct.values()[i] = 0.001 * static_cast<double>(i);
  const auto t = window_abundances(distinct, 5, 5, {11});
  EXPECT_NEAR(renyi(t, 2.0, std::numbers::e, -1), std::log(121.0), 1e-9);

  AbundanceTable two{{0.1, 0.7}, {3, 3}, 6};
  EXPECT_NEAR(renyi(two, 2.0, std::numbers::e, -1), std::log(2.0), 1e-12);
  EXPECT_NEAR(renyi(two, 3.0, 2.0, -1), 1.0, 1e-12);

  AbundanceTable rao_case{{1.0, 4.0}, {5, 4}, 9};
  EXPECT_NEAR(rao_q(rao_case, find_distance("euclidean"), -1), 40.0 / 27.0, 1e-12);
  EXPECT_NEAR(rao_q(rao_case, find_distance("discrete"), -1), 40.0 / 81.0, 1e-12);

  AbundanceTable single{{0.3}, {9}, 9};
  EXPECT_EQ(rao_q(single, find_distance("euclidean"), -1), 0.0);
  EXPECT_EQ(renyi(single, 0.5, 2.0, -1), 0.0);

  AbundanceTable none;
  EXPECT_EQ(rao_q(none, find_distance("euclidean"), -3000), -3000);
  EXPECT_EQ(renyi(none, 2.0, 2.0, -3000), -3000);
}

TEST(Indices, RenyiIgnoresLabelValuesRaoDoesNot) {
  AbundanceTable a{{1.0, 2.0, 3.0}, {2, 3, 4}, 9};
  AbundanceTable b{{-5.0, 0.25, 9.0}, {2, 3, 4}, 9};
  EXPECT_EQ(renyi(a, 2.0, 2.0, -1), renyi(b, 2.0, 2.0, -1));
  const auto d = find_distance("euclidean");
  EXPECT_NE(rao_q(a, d, -1), rao_q(b, d, -1));
}

TEST(Indices, RenyiParams) {
  EXPECT_THROW(validate_renyi_params(1.0, 2.0), std::invalid_argument);
  EXPECT_THROW(validate_renyi_params(0.0, 2.0), std::invalid_argument);
  EXPECT_THROW(validate_renyi_params(2.0, 1.0), std::invalid_argument);
  const Raster r(5, 5);
  EXPECT_THROW(renyi(r, {3}, 1.0, 2.0), std::invalid_argument);
}

TEST(Distances, Registry) {
  EXPECT_THROW(find_distance("manhattan-ish"), std::invalid_argument);
  register_distance("squared", [](double a, double b) { return (a - b) * (a - b); });
  AbundanceTable t{{1.0, 4.0}, {5, 4}, 9};
  EXPECT_NEAR(rao_q(t, find_distance("squared"), -1), 2.0 * 20.0 / 81.0 * 9.0, 1e-12);
  const auto names = distance_names();
  EXPECT_NE(std::find(names.begin(), names.end(), "discrete"), names.end());
  EXPECT_THROW(register_distance("null", nullptr), std::invalid_argument);
}

TEST(Maps, ConstantRasterInteriorIsZero) {
  Raster r(20, 20);
  std::fill(r.values().begin(), r.values().end(), 0.42);
  const auto m = rao_q(r, {11});
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 20; ++j) {
      const bool interior = i >= 5 && j >= 5 && i < 15 && j < 15;
      EXPECT_EQ(m.values(i, j), interior ? 0.0 : r.nodata()) << i << "," << j;
    }
  }
  EXPECT_EQ(m.index, "rao");
  EXPECT_EQ(m.distance, "euclidean");
}

TEST(Maps, AllMissingWindowIsMissing) {
  Raster r(7, 7);
  std::fill(r.values().begin(), r.values().end(), r.nodata());
  r(0, 0) = 1.0;
  const auto m = renyi(r, {3, Border::Shrink}, 2.0, 2.0);
  EXPECT_EQ(m.values(0, 0), 0.0);
  EXPECT_EQ(m.values(4, 4), r.nodata());
}

TEST(Maps, MatchNaiveOracle) {
  Rng rng(51);
  for (int trial = 0; trial < 4; ++trial) {
    const Raster r = tbtest::random_label_raster(rng, 17, 23, 5, 0.15);
    for (Border border : {Border::InteriorMissing, Border::Shrink}) {
      const WindowSpec spec{5, border};
      const bool interior = border == Border::InteriorMissing;
      const auto rq = rao_q(r, spec, "euclidean", 1);
      const auto rd = rao_q(r, spec, "discrete", 1);
      const auto re = renyi(r, spec, 0.5, 2.0, 1);
      for (std::size_t i = 0; i < r.rows(); ++i) {
        for (std::size_t j = 0; j < r.cols(); ++j) {
          if (interior && !tbtest::oracle::window_fits(r, i, j, 5)) {
            EXPECT_EQ(rq.values(i, j), r.nodata());
            continue;
          }
          const auto vals = tbtest::oracle::window_values(r, i, j, 5, interior);
          if (vals.empty()) {
            EXPECT_EQ(rq.values(i, j), r.nodata());
            continue;
          }
          EXPECT_NEAR(rq.values(i, j), tbtest::oracle::rao(vals, euclid), 1e-12);
          EXPECT_NEAR(rd.values(i, j), tbtest::oracle::rao(vals, discrete), 1e-12);
          EXPECT_NEAR(re.values(i, j), tbtest::oracle::renyi(vals, 0.5, 2.0), 1e-12);
        }
      }
    }
  }
}

TEST(Maps, ThreadCountDoesNotChangeBits) {
  Rng rng(52);
  const Raster r = tbtest::random_label_raster(rng, 31, 29, 7, 0.1);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto base = rao_q(r, {7, Border::Shrink}, "euclidean", 1);
  const auto base_r = renyi(r, {7}, 3.0, std::numbers::e, 1);
  for (unsigned threads : {2u, 3u, 8u, hw, 0u}) {
    EXPECT_TRUE(same_bits(base.values, rao_q(r, {7, Border::Shrink}, "euclidean", threads).values));
    EXPECT_TRUE(same_bits(base_r.values, renyi(r, {7}, 3.0, std::numbers::e, threads).values));
  }
}

}  // namespace
