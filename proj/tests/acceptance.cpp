// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Tolerances and trial counts are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "support.hpp"
#include "tensorbio/analysis.hpp"
#include "tensorbio/biodiv.hpp"
#include "tensorbio/file_io.hpp"
#include "tensorbio/hosvd.hpp"
#include "tensorbio/pipeline.hpp"
#include "tensorbio/raster.hpp"

namespace {

using namespace tensorbio;
using tbtest::Rng;
namespace fs = std::filesystem;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Compression ratios of the (i, i, 2) ranks on the two reference extents,
// to 4 decimal places.
Outcome compression_ratios() {
  Outcome out;
  struct Row {
    std::size_t rank;
    double europe_rel, europe_abs, earth_rel, earth_abs;
  };
  const Row table[] = {
      {10, 0.0019, 0.0013, 0.0021, 0.0014},   {50, 0.0095, 0.0063, 0.0105, 0.0070},
      {100, 0.0191, 0.0127, 0.0212, 0.0141},  {500, 0.1024, 0.0683, 0.1138, 0.0759},
      {1000, 0.2222, 0.1481, 0.2469, 0.1646},
  };
  auto round4 = [](double v) { return std::round(v * 1e4) / 1e4; };
  int cells = 0;
  for (const auto& row : table) {
    const MultilinearRank r{row.rank, row.rank, 2};
    const auto europe = band_storage_cost(4800, 6000, r);
    const auto earth = band_storage_cost(3600, 7200, r);
    const std::pair<double, double> checks[] = {{europe.relative_ratio, row.europe_rel},
                                                {europe.absolute_ratio, row.europe_abs},
                                                {earth.relative_ratio, row.earth_rel},
                                                {earth.absolute_ratio, row.earth_abs}};
    for (const auto& [got, want] : checks) {
      ++cells;
      if (std::abs(round4(got) - want) > 1e-12) {
        out.fail("rank " + std::to_string(row.rank) + ": " + fmt("%.6f", got) + " vs " + fmt("%.4f", want));
      }
    }
  }
  if (out.ok) out.detail = std::to_string(cells) + " cells match";
  return out;
}

// 2. Orthonormality, Pythagoras, telescoping and the upper bound on 200
// random tensors up to 40 x 50 x 3.
Outcome hosvd_identities() {
  Outcome out;
  Rng rng(2002);
  double worst_orth = 0, worst_pyth = 0, worst_tele = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<std::size_t> dims{rng.index(1, 40), rng.index(1, 50), rng.index(1, 3)};
    const Tensor t = tbtest::random_tensor(rng, dims);
    MultilinearRank rank;
    for (std::size_t n : dims) rank.push_back(rng.index(1, n));
    const double norm_sq = squared_norm(t);
    const double bound = error_upper_bound(t, rank);

    std::vector<TuckerFactors> decomps{t_hosvd(t, rank)};
    for (int k = 0; k < 3; ++k) {
      std::vector<std::size_t> order{0, 1, 2};
      std::shuffle(order.begin(), order.end(), rng.engine());
      decomps.push_back(st_hosvd(t, rank, order));
    }
    for (const auto& f : decomps) {
      for (const auto& u : f.factors) worst_orth = std::max(worst_orth, tbtest::orthonormality_defect(u));
      const double err = exact_error(t, f);
      worst_pyth = std::max(worst_pyth, std::abs(norm_sq - squared_norm(f.core) - err * err) / norm_sq);
      if (bound * bound + 1e-12 * norm_sq < err * err) {
        out.fail("trial " + std::to_string(trial) + ": bound " + fmt("%.6e", bound) + " < error " +
                 fmt("%.6e", err));
      }
      if (f.method != Method::StHosvd) continue;
      // Sum of the energies removed by each successive projection.
      double tele = 0.0;
      Tensor prev = t;
      for (std::size_t mode : f.processing_order) {
        const Matrix p = matmul(f.factors[mode], f.factors[mode].transpose());
        const Tensor next = mode_dot(prev, p, mode);
        const double d = tbtest::diff_norm(prev.data(), next.data());
        tele += d * d;
        prev = next;
      }
      worst_tele = std::max(worst_tele, std::abs(tele - err * err) / norm_sq);
    }
  }
  if (worst_orth > 1e-10) out.fail("orthonormality defect " + fmt("%.3e", worst_orth));
  if (worst_pyth > 1e-8) out.fail("Pythagoras relative gap " + fmt("%.3e", worst_pyth));
  if (worst_tele > 1e-8) out.fail("telescoping relative gap " + fmt("%.3e", worst_tele));
  if (out.ok) {
    out.detail = "orth " + fmt("%.1e", worst_orth) + ", pyth " + fmt("%.1e", worst_pyth) + ", tele " +
                 fmt("%.1e", worst_tele);
  }
  return out;
}

// 3. Single-mode truncation of n x m x 1 tensors equals the optimal rank-r
// matrix error from a full SVD.
Outcome eckart_young() {
  Outcome out;
  Rng rng(3003);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng.index(2, 40), m = rng.index(2, 50);
    const std::size_t r = rng.index(1, std::min(n, m) - 1);
    const Tensor t = tbtest::random_tensor(rng, {n, m, 1});
    const double err = exact_error(t, t_hosvd(t, {r, m, 1}));
    const Eigen::VectorXd sv =
        Eigen::JacobiSVD<Eigen::MatrixXd>(tbtest::to_eigen(unfold(t, 0))).singularValues();
    double tail = 0.0;
    for (Eigen::Index j = static_cast<Eigen::Index>(r); j < sv.size(); ++j) tail += sv(j) * sv(j);
    const double optimal = std::sqrt(tail);
    worst = std::max(worst, std::abs(err - optimal) / optimal);
  }
  if (worst > 1e-9) out.fail("relative gap " + fmt("%.3e", worst));
  if (out.ok) out.detail = "worst relative gap " + fmt("%.1e", worst);
  return out;
}

// 4. Full-rank compression leaves the index maps unchanged to 1e-8 per pixel.
Outcome full_rank_lossless() {
  Outcome out;
  const auto [red, nir] = synthetic_scene(120, 150, 4004);
  const Raster base_ndvi = ndvi(red, nir);
  const WindowSpec spec{11};
  const IndexMap base_rao = rao_q(base_ndvi, spec);
  const IndexMap base_renyi = renyi(base_ndvi, spec);
  double worst = 0.0;
  for (BandLayout layout : {BandLayout::RedDup, BandLayout::NirDup}) {
    const BandStack stack = stack_bands(red, nir, layout);
    for (Method method : {Method::THosvd, Method::StHosvd}) {
      const MultilinearRank full{120, 150, 3};
      const TuckerFactors f = method == Method::THosvd ? t_hosvd(stack.tensor, full)
                                                       : st_hosvd(stack.tensor, full);
      const auto [r2, n2] = extract_bands(reconstruct(f), stack.nodata);
      const Raster approx = ndvi(r2, n2);
      const auto e1 = map_error(base_rao, rao_q(approx, spec), "rao");
      const auto e2 = map_error(base_renyi, renyi(approx, spec), "renyi");
      if (e1.valid_pixels != 110 * 140 || e2.valid_pixels != 110 * 140) {
        out.fail("unexpected valid pixel count");
      }
      worst = std::max({worst, e1.per_pixel_error, e2.per_pixel_error});
    }
  }
  if (worst > 1e-8) out.fail("per-pixel error " + fmt("%.3e", worst));
  if (out.ok) out.detail = "worst per-pixel error " + fmt("%.1e", worst);
  return out;
}

double euclid(double a, double b) { return std::abs(a - b); }
double discrete(double a, double b) { return a == b ? 0.0 : 1.0; }

bool same_bits(const Raster& a, const Raster& b) {
  return a.size() == b.size() &&
         std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

// 5. Index maps equal brute-force window sums at every cell, for both border
// policies, independent of thread count.
Outcome index_oracles() {
  Outcome out;
  Rng rng(5005);
  const unsigned max_threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t sides[] = {3, 5, 7, 11};
  double worst = 0.0;
  std::size_t cells = 0;

  for (int trial = 0; trial < 20; ++trial) {
    const Raster r = tbtest::random_label_raster(rng, 30, 30, 3 + trial % 6, 0.12);
    const std::size_t side = sides[trial % 4];
    for (Border border : {Border::InteriorMissing, Border::Shrink}) {
      const WindowSpec spec{side, border};
      const bool interior = border == Border::InteriorMissing;

      struct Variant {
        std::function<IndexMap(unsigned)> run;
        std::function<double(const std::vector<double>&)> oracle;
      };
      std::vector<Variant> variants{
          {[&](unsigned th) { return rao_q(r, spec, "euclidean", th); },
           [](const std::vector<double>& v) { return tbtest::oracle::rao(v, euclid); }},
          {[&](unsigned th) { return rao_q(r, spec, "discrete", th); },
           [](const std::vector<double>& v) { return tbtest::oracle::rao(v, discrete); }},
      };
      for (double alpha : {0.5, 2.0, 3.0}) {
        for (double base : {std::numbers::e, 2.0}) {
          variants.push_back({[&r, spec, alpha, base](unsigned th) { return renyi(r, spec, alpha, base, th); },
                              [alpha, base](const std::vector<double>& v) {
                                return tbtest::oracle::renyi(v, alpha, base);
                              }});
        }
      }

      for (const auto& v : variants) {
        const IndexMap one = v.run(1);
        for (unsigned th : {2u, 4u, max_threads}) {
          if (!same_bits(one.values, v.run(th).values)) {
            out.fail("trial " + std::to_string(trial) + ": output differs with " + std::to_string(th) +
                     " threads");
          }
        }
        for (std::size_t i = 0; i < r.rows(); ++i) {
          for (std::size_t j = 0; j < r.cols(); ++j) {
            const double got = one.values(i, j);
            const auto vals = tbtest::oracle::window_values(r, i, j, side, interior);
            if (vals.empty()) {
              if (got != r.nodata()) out.fail("expected missing at " + std::to_string(i) + "," + std::to_string(j));
              continue;
            }
            const double want = v.oracle(vals);
            worst = std::max(worst, std::abs(got - want));
            ++cells;
          }
        }
      }
    }
  }
  if (worst > 1e-12) out.fail("max abs deviation " + fmt("%.3e", worst));
  if (out.ok) out.detail = std::to_string(cells) + " cells, max abs deviation " + fmt("%.1e", worst);
  return out;
}

// 6. Closed-form values.
Outcome spot_values() {
  Outcome out;
  Raster distinct(11, 11);
  for (std::size_t i = 0; i < distinct.size(); ++i) distinct.values()[i] = 0.5 + 0.003 * static_cast<double>(i);
  const double h121 = renyi(distinct, {11}).values(5, 5);
  if (std::abs(h121 - std::log(121.0)) > 1e-9) out.fail("Renyi of 121 labels " + fmt("%.15g", h121));

  Raster halves(3, 3, {0.2, 0.7, 0.2, 0.7, -3000, 0.2, 0.7, 0.2, 0.7});
  const double h2 = renyi(halves, {3}).values(1, 1);
  if (std::abs(h2 - std::log(2.0)) > 1e-12) out.fail("Renyi of two equal labels " + fmt("%.15g", h2));

  Raster rao_win(3, 3, {1, 4, 1, 4, 1, 4, 1, 4, 1});
  const double q = rao_q(rao_win, {3}).values(1, 1);
  if (std::abs(q - 40.0 / 27.0) > 1e-12) out.fail("Rao " + fmt("%.15g", q));

  const Raster n = ndvi(Raster(1, 1, std::vector<double>{1000.0}), Raster(1, 1, std::vector<double>{3000.0}));
  if (n(0, 0) != 0.5) out.fail("NDVI(1000, 3000) = " + fmt("%.17g", n(0, 0)));

  if (out.ok) out.detail = "ln121, ln2, 40/27, NDVI 0.5";
  return out;
}

// 7. cmd_compare writes exactly the six statistics plus n, valid under the
// shipped schema, with the unbiased variance.
Outcome report_schema_fidelity() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "tensorbio_acceptance_c7";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string cfg_text = "ranks = [[6, 6, 2]]\nwindow = 5\n";
  for (int i = 0; i < 3; ++i) {
    const std::string id = "img" + std::to_string(i);
    const auto [red, nir] = synthetic_scene(30, 36, 700 + i);
    write_raster(red, dir / (id + "_red.ras"));
    write_raster(nir, dir / (id + "_nir.ras"));
    cfg_text += "[image." + id + "]\nred = \"" + id + "_red.ras\"\nnir = \"" + id + "_nir.ras\"\n";
  }
  const PipelineConfig cfg = parse_config(cfg_text, dir);
  for (auto* cmd : {&cmd_compress, &cmd_ndvi, &cmd_index, &cmd_compare}) {
    const auto res = (*cmd)(cfg);
    if (!res.ok()) out.fail(res.errors.front());
  }
  if (!out.ok) return out;

  const auto doc = nlohmann::json::parse(read_file(cfg.out / "reports" / "compare.st.red-dup.r6x6x2.json"));
  const auto shipped = nlohmann::json::parse(read_file(fs::path(TENSORBIO_SOURCE_DIR) / "schemas" /
                                                       "error_report.schema.json"));
  if (shipped != report_schema()) out.fail("embedded schema differs from schemas/error_report.schema.json");
  const auto problems = validate_json(doc, shipped);
  if (!problems.empty()) out.fail("schema: " + problems.front());

  std::set<std::string> keys;
  for (const auto& [k, v] : doc["stats"].items()) keys.insert(k);
  const std::set<std::string> expected{"n", "mean_e", "mean_ep", "var_e", "var_ep", "min_ep", "max_ep"};
  if (keys != expected) out.fail("stats keys differ from the statistic set");

  // Recompute the statistics from the records.
  std::vector<double> e, ep;
  for (const auto& rec : doc["records"]) {
    e.push_back(rec["frobenius_error"].get<double>());
    ep.push_back(rec["per_pixel_error"].get<double>());
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto var = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  const auto& s = doc["stats"];
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(b), 1e-300); };
  if (s["n"].get<std::size_t>() != 3 || !close(s["mean_e"].get<double>(), mean(e)) ||
      !close(s["mean_ep"].get<double>(), mean(ep)) || !close(s["var_e"].get<double>(), var(e)) ||
      !close(s["var_ep"].get<double>(), var(ep)) ||
      s["min_ep"].get<double>() != *std::min_element(ep.begin(), ep.end()) ||
      s["max_ep"].get<double>() != *std::max_element(ep.begin(), ep.end())) {
    out.fail("statistics do not match the records");
  }

  const std::vector<ErrorRecord> hand{{"a", 1.0, 0.1, 1, 0}, {"b", 1.0, 0.3, 1, 0}};
  const double v = summarize(hand).var_ep;
  if (std::abs(v - 0.02) > 1e-15) out.fail("Var of (0.1, 0.3) = " + fmt("%.17g", v));
  if (out.ok) out.detail = "schema valid, 7 stats keys, Var(0.1, 0.3) = " + fmt("%.15g", v);
  return out;
}

// 8. The README states that the data-dependent error tables are not
// reproduced.
Outcome readme_statement() {
  Outcome out;
  std::string text;
  try {
    text = read_file(fs::path(TENSORBIO_SOURCE_DIR) / "README.md");
  } catch (const std::exception& e) {
    out.fail(e.what());
    return out;
  }
  for (const char* needle : {"Tables 1–2 and 4–9", "not reproducible", "proprietary NASA"}) {
    if (text.find(needle) == std::string::npos) out.fail(std::string("README lacks \"") + needle + "\"");
  }
  if (out.ok) out.detail = "statement present; criteria 2-6 are the substitute";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
    double limit_seconds;  // 0 = none
  };
  const Criterion criteria[] = {
      {1, "compression-ratio table", &compression_ratios, 1.0},
      {2, "HOSVD identity suite", &hosvd_identities, 120.0},
      {3, "Eckart-Young oracle", &eckart_young, 0.0},
      {4, "full-rank end-to-end losslessness", &full_rank_lossless, 30.0},
      {5, "index oracle equivalence", &index_oracles, 0.0},
      {6, "analytic spot values", &spot_values, 0.0},
      {7, "error-report schema fidelity", &report_schema_fidelity, 0.0},
      {8, "README non-reproducibility statement", &readme_statement, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.fail("took " + fmt("%.2f", secs) + " s, limit " + fmt("%.0f", c.limit_seconds) + " s");
    }
    if (!o.ok) ++failures;
    std::printf("[%s] criterion %d: %s (%s; %.2f s)\n", o.ok ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
