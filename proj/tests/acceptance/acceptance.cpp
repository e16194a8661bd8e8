// Acceptance gate: one PASS/FAIL line per criterion, detail lines indented.
// Usage: fpp_acceptance --criterion N [--work DIR] [--threads T]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "fpp/cli.hpp"
#include "fpp/data/synth.hpp"
#include "fpp/data/transform.hpp"
#include "fpp/models/loss.hpp"
#include "fpp/models/ols.hpp"
#include "fpp/optim/fit.hpp"
#include "fpp/optim/stiefel.hpp"
#include "fpp/parallel.hpp"
#include "fpp/random.hpp"
#include "fpp/report/json.hpp"
#include "fpp/report/svg.hpp"
#include "fpp/significance/grid.hpp"
#include "fpp/significance/null.hpp"

namespace fs = std::filesystem;
using namespace fpp;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

struct Settings {
  fs::path work = "acceptance_work";
  unsigned threads = 0;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

void detail(const std::string& line) { std::cout << "  " << line << '\n'; }

bool verdict(int criterion, bool pass, const std::string& summary) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": " << summary << std::endl;
  return pass;
}

double largest_angle_deg(const FitResult& r, const Dataset& d) {
  return principal_angles(r.composite, ProjectionMatrix(d.meta()->ground_truth)).maxCoeff() * kDeg;
}

HyperParams seeded(std::uint64_t seed) {
  HyperParams hp;
  hp.seed = seed;
  return hp;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fpp");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) detail("cli error: " + err.str());
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ------------------------------------------------------------------ 1

bool circle_recovery(const Settings&) {
  bool pass = true;
  std::ostringstream summary;
  for (std::size_t dim : {5u, 30u}) {
    int good = 0;
    double worst_angle = 0.0, worst_r2 = 1.0, slowest = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Dataset d = synth_circle(3000, dim, 0.05, seed);
      Stopwatch clock;
      const HoldoutFit h = fit_with_holdout(d, seeded(seed), 0.2);
      const double secs = clock.seconds();
      const double angle = largest_angle_deg(h.result, d);
      const double r2 = h.result.test_scores[0].value;
      detail("D=" + std::to_string(dim) + " seed " + std::to_string(seed) + ": angle " + num(angle) +
             " deg, held-out R2 " + num(r2) + ", " + num(secs, 3) + " s");
      good += angle < 5.0 && r2 >= 0.9;
      worst_angle = std::max(worst_angle, angle);
      worst_r2 = std::min(worst_r2, r2);
      slowest = std::max(slowest, secs);
    }
    pass = pass && good >= 8 && slowest <= 60.0;
    if (summary.tellp() > 0) summary << "; ";
    summary << "D=" << dim << " " << good << "/10 seeds (need 8) with angle < 5 deg and R2 >= 0.9 [max angle "
            << num(worst_angle, 3) << ", min R2 " << num(worst_r2, 3) << ", slowest fit " << num(slowest, 3)
            << " s <= 60]";
  }
  return verdict(1, pass, summary.str());
}

// ------------------------------------------------------------------ 2

bool null_separation(const Settings& s) {
  constexpr std::size_t kTrials = 300;
  int separated = 0, total = 0;
  bool shuffled_ok = true;
  std::ostringstream shuffled_summary;
  for (std::size_t dim : {5u, 30u}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Dataset d = synth_circle(3000, dim, 0.05, seed);
      const HyperParams hp = seeded(seed);
      const HoldoutFit h = fit_with_holdout(d, hp, 0.2);
      Stopwatch clock;
      const NullDistribution null = null_distribution(h.split.train, hp, kTrials, seed, s.threads);
      const double observed = h.result.final_train_loss;
      const double lowest = *std::min_element(null.samples.begin(), null.samples.end());
      const double p = p_value_empirical(observed, null);
      detail("D=" + std::to_string(dim) + " seed " + std::to_string(seed) + ": observed loss " + num(observed) +
             ", null min " + num(lowest) + ", p_empirical " + num(p) + " (" + num(clock.seconds(), 3) + " s)");
      separated += observed < lowest && p == 1.0 / (kTrials + 1);
      ++total;
    }
    const Dataset d = shuffle_response(synth_circle(3000, dim, 0.05, 1), 0, 4242);
    const HyperParams hp = seeded(1);
    const HoldoutFit h = fit_with_holdout(d, hp, 0.2);
    const NullDistribution null = null_distribution(h.split.train, hp, kTrials, 1, s.threads);
    const double p = p_value_empirical(h.result.final_train_loss, null);
    detail("D=" + std::to_string(dim) + " shuffled response: observed loss " + num(h.result.final_train_loss) +
           ", p_empirical " + num(p));
    shuffled_ok = shuffled_ok && p > 0.05;
    if (shuffled_summary.tellp() > 0) shuffled_summary << ", ";
    shuffled_summary << "D=" << dim << " p " << num(p, 3);
  }
  return verdict(2, separated == total && shuffled_ok,
                 std::to_string(separated) + "/" + std::to_string(total) +
                     " fits have observed loss below all 300 null losses (p = 1/301); shuffled response p_empirical > 0.05: " +
                     shuffled_summary.str());
}

// ------------------------------------------------------------------ 3

bool grid_shape(const Settings& s) {
  const fs::path out = s.work / "grid";
  Stopwatch clock;
  if (run_cli({"grid", "--out", out.string(), "--threads", std::to_string(s.threads)}) != 0) {
    return verdict(3, false, "grid command failed");
  }
  const double secs = clock.seconds();
  const Json j = read_json_file(out / "grid.json");
  const auto dims = j.at("dims").get<std::vector<double>>();
  const auto sizes = j.at("sizes").get<std::vector<double>>();
  const Matrix mean = matrix_from_json(j.at("mean_r2"));
  const Matrix p = matrix_from_json(j.at("p_at_reference"));

  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    std::ostringstream row;
    row << "D=" << dims[static_cast<std::size_t>(i)] << " mean R2:";
    for (Eigen::Index k = 0; k < mean.cols(); ++k) row << ' ' << num(mean(i, k), 3);
    row << " | p:";
    for (Eigen::Index k = 0; k < p.cols(); ++k) row << ' ' << num(p(i, k), 3);
    detail(row.str());
  }

  bool monotone = true;
  double weakest_d = 1.0, weakest_n = -1.0;
  for (Eigen::Index k = 0; k < mean.cols(); ++k) {
    std::vector<double> col(mean.col(k).data(), mean.col(k).data() + mean.rows());
    const double rho = spearman(dims, col);
    weakest_d = std::min(weakest_d, rho);
    monotone = monotone && rho > 0.8;
  }
  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index k = 0; k < mean.cols(); ++k) row.push_back(mean(i, k));
    const double rho = spearman(sizes, row);
    weakest_n = std::max(weakest_n, rho);
    monotone = monotone && rho < -0.8;
  }
  detail("Spearman rho of mean R2 vs D per N column, smallest: " + num(weakest_d, 3) +
         "; vs N per D row, largest: " + num(weakest_n, 3));

  // Criterion as written: N >= 10 D non-significant, N <= 2 D significant.
  int literal_bad = 0, literal_cells = 0;
  // Direction of the source prose: N >= 10 D significant, N <= 2 D not.
  int prose_bad = 0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index k = 0; k < p.cols(); ++k) {
      const double d = dims[static_cast<std::size_t>(i)];
      const double n = sizes[static_cast<std::size_t>(k)];
      if (n >= 10 * d) {
        ++literal_cells;
        literal_bad += !(p(i, k) >= 0.05);
        prose_bad += !(p(i, k) < 0.05);
      } else if (n <= 2 * d) {
        ++literal_cells;
        literal_bad += !(p(i, k) < 0.05);
        prose_bad += !(p(i, k) >= 0.05);
      }
    }
  }
  detail("p-map as stated (N >= 10D -> p >= 0.05, N <= 2D -> p < 0.05): " + std::to_string(literal_bad) + " of " +
         std::to_string(literal_cells) + " cells violate");
  detail("info only, reversed direction (N >= 10D -> p < 0.05, N <= 2D -> p >= 0.05): " +
         std::to_string(prose_bad) + " of " + std::to_string(literal_cells) + " cells violate");
  const bool pass = monotone && literal_bad == 0 && secs <= 1800.0;
  return verdict(3, pass,
                 std::string("mean R2 monotone along every grid line ") + (monotone ? "yes" : "no") +
                     "; p-map as stated " + (literal_bad == 0 ? "holds" : "violated in " + std::to_string(literal_bad) + " cells") +
                     "; runtime " + num(secs, 4) + " s <= 1800");
}

// ------------------------------------------------------------------ 4

bool multi_response(const Settings&) {
  const Dataset d = synth_multi(100000, 5, 15, 1);
  Stopwatch clock;
  const HoldoutFit h = fit_with_holdout(d, seeded(1), 0.2);
  const double angle = largest_angle_deg(h.result, d);
  const double mean = mean_score(h.result.test_scores);
  double lowest = 1.0;
  for (const auto& sc : h.result.test_scores) lowest = std::min(lowest, sc.value);
  detail("fit " + num(clock.seconds(), 3) + " s, held-out R2 per response min " + num(lowest));
  return verdict(4, mean >= 0.8 && angle < 5.0,
                 "mean held-out R2 " + num(mean) + " (need >= 0.8), largest angle " + num(angle) + " deg (need < 5)");
}

// ------------------------------------------------------------------ 5

bool classification(const Settings& s) {
  const Dataset d = synth_blobs(10000, 784, 5, 8.0, 1);
  Stopwatch clock;
  const HoldoutFit h = fit_with_holdout(d, seeded(1), 0.2);
  const double train = h.result.train_scores[0].value;
  const double test = h.result.test_scores[0].value;
  detail("fit " + num(clock.seconds(), 3) + " s");
  fs::create_directories(s.work);
  const fs::path svg = s.work / "blobs_train_test.svg";
  write_text_file(svg, panels_svg({{h.result.embed(h.split.train.features()), h.split.train.response(0), "train"},
                                   {h.result.embed(h.split.test.features()), h.split.test.response(0), "test"}}));
  detail("train/test scatter: " + svg.string());
  return verdict(5, test >= 0.95 && std::abs(train - test) <= 0.05,
                 "held-out accuracy " + num(test) + " (need >= 0.95), train " + num(train) + ", gap " +
                     num(std::abs(train - test), 3) + " (need <= 0.05)");
}

// ------------------------------------------------------------------ 6

bool overfit_detection(const Settings& s) {
  const Dataset d = synth_noise(800, 20000, 1);
  HyperParams hp = seeded(1);
  hp.epochs = 10;
  hp.batch_size = 30;
  Stopwatch clock;
  const HoldoutFit h = fit_with_holdout(d, hp, 0.2);
  const double train = mean_score(h.result.train_scores);
  const double test = mean_score(h.result.test_scores);
  detail("fit " + num(clock.seconds(), 3) + " s, train R2 " + num(train) + ", test R2 " + num(test));
  Stopwatch null_clock;
  const NullDistribution null = null_distribution(h.split.train, hp, 100, 1, s.threads);
  const SignificanceReport report = significance_report(h.result.final_train_loss, null);
  const OverfitAssessment a = assess_overfit(train, test, report.p_parametric);
  detail("100-trial null in " + num(null_clock.seconds(), 3) + " s: observed loss " + num(report.observed) +
         ", null mean " + num(null.mean()) + ", sd " + num(null.stddev()) + ", p_empirical " + num(report.p_empirical));
  return verdict(6, report.p_parametric > 0.05 && test < 0.1 && a.suspect,
                 "p_parametric " + num(report.p_parametric) + " (need > 0.05), test R2 " + num(test) +
                     " (need < 0.1), verdict " + a.verdict());
}

// ------------------------------------------------------------------ 7

struct Check {
  std::string name;
  bool pass;
  std::string note;
};

double rel(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-8});
}

Check polynomial_gradients() {
  Engine e = make_engine(701);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int degree = 1 + t % 4;
    const Eigen::Index n = 5 + t % 20;
    PolynomialHead head{degree, Vector(monomial_count(degree))};
    for (auto& c : head.coefficients) c = standard_normal(e);
    Points2 y(n, 2);
    Vector f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i, 0) = standard_normal(e);
      y(i, 1) = standard_normal(e);
      f(i) = standard_normal(e);
    }
    const PolynomialGradient g = head_gradients(head, y, f);
    const double h = 1e-6;
    Vector nt(head.coefficients.size());
    for (Eigen::Index k = 0; k < nt.size(); ++k) {
      PolynomialHead a = head, b = head;
      a.coefficients(k) += h;
      b.coefficients(k) -= h;
      nt(k) = (mse_loss(a.predict(y), f).value - mse_loss(b.predict(y), f).value) / (2 * h);
    }
    Points2 ny(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) {
        Points2 a = y, b = y;
        a(i, c) += h;
        b(i, c) -= h;
        ny(i, c) = (mse_loss(head.predict(a), f).value - mse_loss(head.predict(b), f).value) / (2 * h);
      }
    }
    worst = std::max({worst, rel(g.coefficients, nt), rel(g.inputs, ny)});
  }
  return {"polynomial gradient vs central differences, 100 instances", worst < 1e-5, "max rel err " + num(worst, 3)};
}

Check softmax_gradients() {
  Engine e = make_engine(702);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int k = 2 + t % 4;
    const Eigen::Index n = 3 + t % 12;
    SoftmaxHead head = SoftmaxHead::random(k, t % 5 == 0 ? 0 : 6, e);
    Points2 y(n, 2);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i, 0) = standard_normal(e);
      y(i, 1) = standard_normal(e);
      labels[static_cast<std::size_t>(i)] = static_cast<int>(i % k);
    }
    const SoftmaxGradient g = head_gradients(head, y, labels);
    const double h = 1e-6;
    auto loss = [&](const SoftmaxHead& hd, const Points2& pts) {
      return cross_entropy_loss(hd.predict(pts), labels).value;
    };
    Matrix nw2(head.w2.rows(), head.w2.cols());
    for (Eigen::Index r = 0; r < nw2.rows(); ++r) {
      for (Eigen::Index c = 0; c < nw2.cols(); ++c) {
        SoftmaxHead a = head, b = head;
        a.w2(r, c) += h;
        b.w2(r, c) -= h;
        nw2(r, c) = (loss(a, y) - loss(b, y)) / (2 * h);
      }
    }
    Points2 ny(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) {
        Points2 a = y, b = y;
        a(i, c) += h;
        b(i, c) -= h;
        ny(i, c) = (loss(head, a) - loss(head, b)) / (2 * h);
      }
    }
    worst = std::max({worst, rel(g.parameters.w2, nw2), rel(g.inputs, ny)});
    if (head.hidden_width > 0) {
      Matrix nw1(head.w1.rows(), head.w1.cols());
      for (Eigen::Index r = 0; r < nw1.rows(); ++r) {
        for (Eigen::Index c = 0; c < nw1.cols(); ++c) {
          SoftmaxHead a = head, b = head;
          a.w1(r, c) += h;
          b.w1(r, c) -= h;
          nw1(r, c) = (loss(a, y) - loss(b, y)) / (2 * h);
        }
      }
      worst = std::max(worst, rel(g.parameters.w1, nw1));
    }
  }
  return {"softmax gradient vs central differences, 100 instances", worst < 1e-5, "max rel err " + num(worst, 3)};
}

Check orthonormality() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (auto mode : {RetractionMode::PolarFactor, RetractionMode::PaperU}) {
      HyperParams hp = seeded(seed);
      hp.retraction = mode;
      hp.epochs = 20;
      worst = std::max(worst, fit(synth_blobs(600, 15, 3, 5.0, seed), hp).max_orthonormality_error);
    }
  }
  return {"orthonormality after every step", worst < 1e-8, "max ||P^T P - I|| " + num(worst, 3)};
}

Check idempotence() {
  Engine e = make_engine(703);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    Basis2 p(3 + t % 10, 2);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = standard_normal(e);
    const Basis2 once = retract(p).projection.basis();
    worst = std::max(worst, (retract(once).projection.basis() - once).cwiseAbs().maxCoeff());
  }
  return {"retraction idempotence", worst < 1e-12, "max change " + num(worst, 3)};
}

Check rotation_invariance() {
  Engine e = make_engine(704);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    Points2 y(80, 2);
    Vector f(80);
    for (Eigen::Index i = 0; i < 80; ++i) {
      y(i, 0) = standard_normal(e);
      y(i, 1) = standard_normal(e);
      f(i) = standard_normal(e);
    }
    const int degree = 1 + t % 4;
    const Points2 r = y * rotation2(uniform(e, 0, 360)).transpose();
    const double a = mse_loss(ols_fit(y, f, degree).predict(y), f).value;
    const double b = mse_loss(ols_fit(r, f, degree).predict(r), f).value;
    worst = std::max(worst, std::abs(a - b));
  }
  return {"rotation invariance of refit polynomial loss", worst < 1e-9, "max |diff| " + num(worst, 3)};
}

Check ols_dominance() {
  double margin = 1e300;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset d = synth_circle(1500, 8, 0.05, seed);
    HyperParams hp = seeded(seed);
    hp.polish_heads = false;
    hp.standardize = false;
    const FitResult r = fit(d, hp);
    const Points2 y = r.embed(d.features());
    const Vector& f = d.response(0).values();
    margin = std::min(margin, r.final_train_loss - mse_loss(ols_fit(y, f, 3).predict(y), f).value);
  }
  return {"ols_fit loss <= trained head loss", margin >= -1e-12, "smallest margin " + num(margin, 3)};
}

Check reproducible_fit_and_null() {
  const Dataset d = synth_multi(1000, 6, 3, 7);
  HyperParams hp = seeded(3);
  hp.epochs = 15;
  const FitResult a = fit(d, hp), b = fit(d, hp);
  const bool fit_same = a.projection.basis() == b.projection.basis() && a.loss_history == b.loss_history;
  const NullDistribution n1 = null_distribution(d, hp, 8, 5, 1);
  const NullDistribution n2 = null_distribution(d, hp, 8, 5, std::max(2u, default_thread_count()));
  const bool null_same = n1.samples == n2.samples && n1.r2_samples == n2.r2_samples;
  return {"bit-reproducible fit and null_distribution", fit_same && null_same,
          std::string("fit ") + (fit_same ? "identical" : "differs") + ", null " + (null_same ? "identical" : "differs")};
}

Check reproducible_cli(const Settings& s) {
  const fs::path base = s.work / "cli_repro";
  fs::remove_all(base);
  std::vector<std::string> differing;
  for (const char* run : {"a", "b"}) {
    const fs::path r = base / run;
    const std::string data = (r / "data").string();
    run_cli({"synth", "circle", "--n", "400", "--dim", "6", "--seed", "2", "--out", data});
    run_cli({"fit", "--data", data, "--seed", "4", "--out", (r / "fit").string()});
    run_cli({"project", "--fit", (r / "fit/fit.json").string(), "--data", data, "--rotation", "30", "--out",
             (r / "project").string()});
    run_cli({"pvalue", "--fit", (r / "fit/fit.json").string(), "--data", data, "--trials", "10", "--out",
             (r / "pvalue").string()});
    run_cli({"grid", "--dims", "2,4", "--sizes", "30,60", "--trials", "3", "--min-steps", "60", "--out",
             (r / "grid").string()});
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
    if (!entry.is_regular_file() || entry.path().filename() == "timings.json") continue;
    const fs::path other = base / "b" / fs::relative(entry.path(), base / "a");
    ++compared;
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) differing.push_back(entry.path().string());
  }
  return {"bit-reproducible CLI outputs (synth, fit, project, pvalue, grid)", differing.empty() && compared >= 15,
          std::to_string(compared) + " files compared, " + std::to_string(differing.size()) + " differ"};
}

bool property_suites(const Settings& s) {
  const std::vector<std::function<Check()>> checks{
      polynomial_gradients, softmax_gradients, orthonormality, idempotence, rotation_invariance,
      ols_dominance,        reproducible_fit_and_null, [&] { return reproducible_cli(s); }};
  int passed = 0;
  for (const auto& run : checks) {
    const Check c = run();
    detail(std::string(c.pass ? "ok   " : "FAIL ") + c.name + ": " + c.note);
    passed += c.pass;
  }
  return verdict(7, passed == static_cast<int>(checks.size()),
                 std::to_string(passed) + "/" + std::to_string(checks.size()) + " property checks hold");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FPP acceptance gate"};
  int criterion = 0;
  Settings s;
  std::string work = s.work.string();
  app.add_option("--criterion", criterion, "Criterion number 1-7")->required()->check(CLI::Range(1, 7));
  app.add_option("--work", work, "Scratch directory for generated files");
  app.add_option("--threads", s.threads, "Worker threads (default: available cores)");
  CLI11_PARSE(app, argc, argv);
  s.work = work;
  if (s.threads == 0) s.threads = default_thread_count();
  fs::create_directories(s.work);

  const std::vector<std::function<bool(const Settings&)>> criteria{
      circle_recovery, null_separation, grid_shape, multi_response, classification, overfit_detection, property_suites};
  try {
    return criteria[static_cast<std::size_t>(criterion - 1)](s) ? 0 : 1;
  } catch (const std::exception& e) {
    verdict(criterion, false, std::string("error: ") + e.what());
    return 1;
  }
}
