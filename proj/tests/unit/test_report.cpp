#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <regex>
#include <stack>

#include <gtest/gtest.h>

#include "fpp/data/synth.hpp"
#include "fpp/error.hpp"
#include "fpp/optim/fit.hpp"
#include "fpp/report/json.hpp"
#include "fpp/report/svg.hpp"
#include "test_util.hpp"

namespace fpp {
namespace {

// Minimal well-formedness check: one root, balanced tags, quoted attributes,
// only the five predefined entities, no stray '<' or '&' in text.
::testing::AssertionResult well_formed(const std::string& xml) {
  std::size_t i = 0;
  if (xml.rfind("<?xml", 0) == 0) i = xml.find("?>") + 2;
  std::stack<std::string> open;
  int roots = 0;
  const std::regex attr(R"(\s+[A-Za-z_:][-A-Za-z0-9_:.]*="[^"<]*")");
  while (i < xml.size()) {
    if (xml[i] == '<') {
      const std::size_t end = xml.find('>', i);
      if (end == std::string::npos) return ::testing::AssertionFailure() << "unterminated tag at " << i;
      std::string tag = xml.substr(i + 1, end - i - 1);
      i = end + 1;
      if (!tag.empty() && tag[0] == '/') {
        if (open.empty() || open.top() != tag.substr(1)) {
          return ::testing::AssertionFailure() << "mismatched </" << tag.substr(1) << ">";
        }
        open.pop();
        continue;
      }
      const bool self_closing = !tag.empty() && tag.back() == '/';
      if (self_closing) tag.pop_back();
      std::size_t n = 0;
      while (n < tag.size() && !std::isspace(static_cast<unsigned char>(tag[n]))) ++n;
      const std::string name = tag.substr(0, n);
      if (name.empty()) return ::testing::AssertionFailure() << "empty tag name";
      const std::string rest = std::regex_replace(tag.substr(n), attr, "");
      if (rest.find_first_not_of(" \t\n") != std::string::npos) {
        return ::testing::AssertionFailure() << "bad attributes in <" << name << ">: '" << rest << "'";
      }
      if (open.empty()) ++roots;
      if (!self_closing) open.push(name);
    } else if (xml[i] == '&') {
      const std::size_t semi = xml.find(';', i);
      const std::string ent = xml.substr(i, semi - i + 1);
      if (ent != "&amp;" && ent != "&lt;" && ent != "&gt;" && ent != "&quot;" && ent != "&apos;") {
        return ::testing::AssertionFailure() << "bad entity " << ent;
      }
      i = semi + 1;
    } else {
      if (open.empty() && !std::isspace(static_cast<unsigned char>(xml[i]))) {
        return ::testing::AssertionFailure() << "text outside the root";
      }
      ++i;
    }
  }
  if (!open.empty()) return ::testing::AssertionFailure() << "unclosed <" << open.top() << ">";
  if (roots != 1) return ::testing::AssertionFailure() << roots << " root elements";
  return ::testing::AssertionSuccess();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t c = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++c;
  return c;
}

TEST(XmlChecker, RejectsBrokenDocuments) {
  EXPECT_TRUE(well_formed("<a><b x=\"1\"/>t &amp; u</a>"));
  EXPECT_FALSE(well_formed("<a><b></a>"));
  EXPECT_FALSE(well_formed("<a x=1/>"));
  EXPECT_FALSE(well_formed("<a>&bogus;</a>"));
  EXPECT_FALSE(well_formed("<a/><b/>"));
}

TEST(Svg, EscapeAndColours) {
  EXPECT_EQ(xml_escape("a<b & \"c\" 'd'>"), "a&lt;b &amp; &quot;c&quot; &apos;d&apos;&gt;");
  EXPECT_EQ(css_hex(Rgb{1.0, 0.0, 0.5}), "#ff0080");
  EXPECT_EQ(css_hex(tab10(0)), css_hex(tab10(10)));
  EXPECT_EQ(css_hex(viridis(-3.0)), css_hex(viridis(0.0)));
  EXPECT_EQ(css_hex(viridis(0.0)), "#440154");
  EXPECT_EQ(css_hex(viridis(1.0)), "#fde725");
}

TEST(Svg, ScatterHasOneCirclePerRow) {
  const Dataset d = synth_circle(137, 3, 0.0, 1);
  const Points2 y = d.features().leftCols(2);
  const std::string svg = scatter_svg({y, d.response(0), "ring <&> test"});
  EXPECT_EQ(count(svg, "<circle"), 137u);
  EXPECT_TRUE(well_formed(svg));
  EXPECT_NE(svg.find("ring &lt;&amp;&gt; test"), std::string::npos);
}

TEST(Svg, CategoricalScatterAndPanels) {
  const Dataset d = synth_blobs(90, 4, 3, 5.0, 2);
  const Points2 y = d.features() * d.meta()->ground_truth;
  const std::string one = scatter_svg({y, d.response(0), "blobs"}, {"y1 = +1.00 x0", "y2"});
  EXPECT_EQ(count(one, "<circle"), 90u);
  EXPECT_TRUE(well_formed(one));
  std::vector<std::size_t> first(30);
  std::iota(first.begin(), first.end(), std::size_t{0});
  const std::string two = panels_svg({{y, d.response(0), "train"}, {y.topRows(30), d.response(0).take(first), "test"}});
  EXPECT_EQ(count(two, "<circle"), 120u);
  EXPECT_TRUE(well_formed(two));
}

TEST(Svg, ScatterRejectsBadInput) {
  const Dataset d = synth_circle(5, 3, 0.0, 1);
  Points2 y = d.features().leftCols(2);
  y(2, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(scatter_svg({y, d.response(0), "x"}), ValidationError);
  EXPECT_THROW(scatter_svg({y.topRows(3), d.response(0), "x"}), ValidationError);
}

TEST(Svg, HistogramMarksObserved) {
  std::vector<double> s;
  for (int i = 0; i < 300; ++i) s.push_back(0.9 + 0.001 * (i % 37));
  const std::string svg = histogram_svg(s, 0.06, "null", "training loss");
  EXPECT_TRUE(well_formed(svg));
  EXPECT_NE(svg.find("stroke=\"red\""), std::string::npos);
}

TEST(Svg, HeatmapCells) {
  Matrix v(2, 3);
  v << 0.1, 0.5, std::nan(""), 0.0, 2.0, -1.0;
  const std::string svg = heatmap_svg({v, {"2", "5"}, {"50", "100", "300"}, "mean R2", "D", "N", 0.0, 1.0});
  EXPECT_TRUE(well_formed(svg));
  EXPECT_EQ(count(svg, "stroke=\"white\""), 6u);
  EXPECT_EQ(count(svg, "#cccccc"), 1u);
  EXPECT_THROW(heatmap_svg({Matrix(0, 0), {}, {}, "", "", "", 0.0, 1.0}), ValidationError);
}

TEST(Json, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Json, MatrixLayout) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, std::nan("");
  const Json j = matrix_to_json(m);
  EXPECT_EQ(j["rows"], 2);
  EXPECT_EQ(j["cols"], 3);
  EXPECT_EQ(j["values"][1], 2.0);
  EXPECT_EQ(j["values"][3], 4.0);
  EXPECT_TRUE(j["values"][5].is_null());
  Matrix ok(2, 2);
  ok << 1, 2, 3, 4;
  EXPECT_EQ(matrix_from_json(matrix_to_json(ok)), ok);
}

TEST(Json, HyperParamsRoundTrip) {
  HyperParams hp;
  hp.learning_rate = 0.0125;
  hp.degree = 4;
  hp.retraction = RetractionMode::PaperU;
  hp.optimizer = OptimizerKind::Sgd;
  hp.schedule = LearningRateSchedule::Constant;
  hp.response_degrees = {2, 3};
  const HyperParams back = hyperparams_from_json(to_json(hp));
  EXPECT_EQ(to_json(back).dump(), to_json(hp).dump());
  EXPECT_THROW(hyperparams_from_json(Json{{"learning_rat", 0.1}}), ValidationError);
  EXPECT_THROW(hyperparams_from_json(Json{{"epochs", "many"}}), ValidationError);
  EXPECT_THROW(parse_retraction("qr"), ValidationError);
  EXPECT_EQ(parse_retraction("paper-u"), RetractionMode::PaperU);
}

TEST(Json, FitResultRoundTrip) {
  const Dataset d = synth_multi(300, 6, 2, 3);
  RowMatrix x = d.features();
  std::vector<int> labels(300);
  for (std::size_t i = 0; i < 300; ++i) labels[i] = d.response(0).values()(static_cast<Eigen::Index>(i)) > 0 ? 1 : 0;
  Dataset mixed(x, {d.response(0), Response::categorical("sign", labels, 2)});
  HyperParams hp;
  hp.epochs = 10;
  hp.pre_dim = 4;
  hp.seed = 8;
  const FitResult r = fit(mixed, hp);
  FitProvenance prov;
  prov.samples = prov.train_samples = 300;
  prov.dim = 6;
  prov.ground_truth = d.meta()->ground_truth;
  const Json j = fit_result_to_json(r, prov);
  EXPECT_EQ(j["format"], "fpp.fit_result");
  EXPECT_EQ(j["responses"][1]["kind"], "categorical");
  EXPECT_EQ(j["loss_history"].size(), 10u);
  EXPECT_TRUE(j.contains("ground_truth"));

  const FitResult back = fit_result_from_json(j);
  EXPECT_EQ(back.embed(mixed.features()), r.embed(mixed.features()));
  EXPECT_EQ(evaluate(back, mixed).loss, evaluate(r, mixed).loss);
  EXPECT_EQ(fit_result_to_json(back, prov).dump(), j.dump());

  testing::TempDir dir;
  write_json_file(dir / "fit.json", j);
  EXPECT_EQ(read_json_file(dir / "fit.json"), j);
  EXPECT_EQ(testing::read_file(dir / "fit.json").back(), '\n');
}

TEST(Json, AxisWeights) {
  Basis2 p = Basis2::Zero(4, 2);
  p(0, 0) = 0.6;
  p(3, 0) = -0.8;
  p(1, 1) = 1.0;
  const auto w = top_axis_weights(p, {"a", "b", "c", "d"}, 2);
  ASSERT_EQ(w[0].size(), 2u);
  EXPECT_EQ(w[0][0].feature, "d");
  EXPECT_DOUBLE_EQ(w[0][0].weight, -0.8);
  EXPECT_EQ(w[1][0].feature, "b");
  EXPECT_EQ(axis_caption(w[0]), "-0.80 d, +0.60 a");
}

}  // namespace
}  // namespace fpp
