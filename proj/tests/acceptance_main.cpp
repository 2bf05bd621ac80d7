// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "rddg/ascent.hpp"
#include "rddg/benchmark_data.hpp"
#include "rddg/classify.hpp"
#include "rddg/coreset.hpp"
#include "rddg/error.hpp"
#include "rddg/feedback.hpp"
#include "rddg/fidelity.hpp"
#include "rddg/gateway.hpp"
#include "rddg/orchestrator.hpp"
#include "rddg/prompts.hpp"
#include "rddg/rng.hpp"
#include "rddg/tabular.hpp"
#include "test_util.hpp"

using namespace rddg;

namespace {

int g_failures = 0;

struct Checker {
  std::ostringstream detail;
  bool ok = true;

  void expect(bool condition, const std::string& message) {
    if (!condition) {
      ok = false;
      detail << "\n    failed: " << message;
    }
  }
  void expect_near(double got, double want, double tol, const std::string& message) {
    if (!(std::fabs(got - want) <= tol)) {
      ok = false;
      detail << "\n    failed: " << message << " (got " << got << ", want " << want << " +- "
             << tol << ")";
    }
  }
};

void criterion(int number, const std::string& name, double time_limit_s,
               const std::function<void(Checker&)>& body) {
  Checker checker;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(checker);
  } catch (const std::exception& e) {
    checker.ok = false;
    checker.detail << "\n    exception: " << e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit_s > 0 && elapsed > time_limit_s) {
    checker.ok = false;
    checker.detail << "\n    runtime " << elapsed << "s exceeded the " << time_limit_s
                   << "s limit";
  }
  std::printf("[%s] criterion %d: %s (%.2fs)%s\n", checker.ok ? "PASS" : "FAIL", number,
              name.c_str(), elapsed, checker.detail.str().c_str());
  std::fflush(stdout);
  if (!checker.ok) ++g_failures;
}

Dataset random_numeric_dataset(Rng& rng, int n_attrs, int n_rows) {
  Schema s;
  for (int c = 0; c < n_attrs; ++c)
    s.attributes.push_back({"n" + std::to_string(c), AttributeKind::numeric, "col", {}});
  s.attributes.push_back({"cls", AttributeKind::categorical, "class", {"a", "b"}});
  s.label = "cls";
  s.classes = {"a", "b"};
  Dataset ds;
  ds.schema = s;
  for (int i = 0; i < n_rows; ++i) {
    Row row;
    for (int c = 0; c < n_attrs; ++c) row.cells.emplace_back(rng.normal(0.0, 1.0 + c));
    row.label = rng.index(2);
    row.cells.emplace_back(std::string(row.label == 0 ? "a" : "b"));
    ds.rows.push_back(row);
  }
  return ds;
}

// ---- criterion bodies --------------------------------------------------------

void metric_oracles(Checker& c) {
  Rng rng(2024);
  for (int instance = 0; instance < 100; ++instance) {
    const int n_attrs = 2 + rng.index(5);   // 2..6
    const int n_rows = 10 + rng.index(291); // 10..300
    const Dataset real = random_numeric_dataset(rng, n_attrs, n_rows);
    const Dataset synth = random_numeric_dataset(rng, n_attrs, n_rows);

    // KL and KS per attribute
    for (int a = 0; a < n_attrs; ++a) {
      const auto ra = real.numeric_column(a);
      const auto sa = synth.numeric_column(a);
      c.expect(std::fabs(kl_divergence_binned(ra, sa, 20) - oracle::kl_binned(ra, sa, 20)) <
                   1e-10,
               "kl oracle mismatch");
      c.expect(std::fabs(ks_statistic(ra, sa) - oracle::ks(ra, sa)) < 1e-10,
               "ks oracle mismatch");
    }
    // Pearson matrices and the four correlation-diff summaries
    const auto mine = correlation_diff_metrics(real, synth);
    std::vector<std::vector<double>> cr(n_attrs, std::vector<double>(n_attrs, 1.0)), cs = cr;
    for (int i = 0; i < n_attrs; ++i)
      for (int j = 0; j < n_attrs; ++j) {
        if (i == j) continue;
        cr[i][j] = oracle::pearson(real.numeric_column(i), real.numeric_column(j));
        cs[i][j] = oracle::pearson(synth.numeric_column(i), synth.numeric_column(j));
        c.expect(std::fabs(mine.real_matrix[i][j] - cr[i][j]) < 1e-10, "pearson mismatch");
      }
    const auto want = oracle::corr_summary(cr, cs);
    c.expect(std::fabs(mine.frobenius - want.frobenius) < 1e-10, "frobenius mismatch");
    c.expect(std::fabs(mine.mae - want.mae) < 1e-10, "mae mismatch");
    c.expect(std::fabs(mine.rmse - want.rmse) < 1e-10, "rmse mismatch");
    c.expect(std::fabs(mine.max_diff - want.max_diff) < 1e-10, "max diff mismatch");

    // classification metrics against the per-sample recount
    const int n_classes = 2 + rng.index(3);
    std::vector<int> y_true, y_pred;
    std::vector<std::string> classes;
    for (int k = 0; k < n_classes; ++k) classes.push_back(std::string(1, char('a' + k)));
    for (int i = 0; i < n_rows; ++i) {
      y_true.push_back(rng.index(n_classes));
      y_pred.push_back(rng.index(n_classes));
    }
    const int minority = rng.index(n_classes);
    const auto got = classification_metrics(y_true, y_pred, classes, minority);
    const auto ref = oracle::metrics(y_true, y_pred, n_classes, minority);
    c.expect(std::fabs(got.macro_f1_weighted - ref.macro_f1_weighted) < 1e-10, "f1 mismatch");
    c.expect(std::fabs(got.balanced_accuracy - ref.balanced_accuracy) < 1e-10,
             "balanced accuracy mismatch");
    c.expect(got.sensitivity == ref.sensitivity, "sensitivity mismatch (integer-count metric)");
    c.expect(std::fabs(got.specificity - ref.specificity) < 1e-10, "specificity mismatch");
  }
}

void hand_values(Checker& c) {
  // KL([0.5,0.5] || [0.25,0.75]) in nats
  c.expect_near(kl_divergence_binned({0, 0, 1, 1}, {0, 1, 1, 1}, 2), 0.1438, 1e-4,
                "two-bin KL hand value");
  // KS([1,2],[1.5,2.5]) is exactly one half
  c.expect(ks_statistic({1, 2}, {1.5, 2.5}) == 0.5, "KS hand value must be exact");
  // n=2 correlation-diff example
  const auto diff = correlation_diff_from_matrices({"a", "b"}, {{1.0, 0.9}, {0.9, 1.0}},
                                                   {{1.0, 0.6}, {0.6, 1.0}});
  c.expect_near(diff.frobenius, 0.4243, 1e-4, "frobenius hand value");
  c.expect_near(diff.frobenius, std::sqrt(0.18), 1e-6, "frobenius exact form");
  c.expect_near(diff.mae, 0.15, 1e-6, "mae hand value");
  c.expect_near(diff.rmse, 0.2121, 1e-4, "rmse hand value");
  c.expect_near(diff.rmse, std::sqrt(0.045), 1e-6, "rmse exact form");
  c.expect_near(diff.max_diff, 0.3, 1e-6, "max diff hand value");
  // binary confusion (TP 8, FN 2, TN 90, FP 10)
  std::vector<int> y_true, y_pred;
  auto add = [&](int t, int p, int n) {
    for (int i = 0; i < n; ++i) {
      y_true.push_back(t);
      y_pred.push_back(p);
    }
  };
  add(0, 0, 8);
  add(0, 1, 2);
  add(1, 1, 90);
  add(1, 0, 10);
  const auto m = classification_metrics(y_true, y_pred, {"pos", "neg"}, 0);
  c.expect(m.sensitivity == 0.8, "sensitivity must be exactly 0.8");
  c.expect(m.specificity == 0.9, "specificity must be exactly 0.9");
  // 0.85 up to the one rounding of the mean: compare with the same expression
  c.expect(m.balanced_accuracy == (0.8 + 0.9) / 2.0, "balanced accuracy must be exactly (0.8+0.9)/2");
}

void gradient_check(Checker& c) {
  const Dataset ds = testutil::blobs(5, 11);
  ProbeConfig cfg;  // full default architecture with attention
  cfg.seed = 3;
  const FeatureEncoder enc = FeatureEncoder::fit(ds);
  const auto X = enc.encode_all(ds);
  std::vector<int> y;
  for (const auto& r : ds.rows) y.push_back(r.label);

  ProbeNetwork net(static_cast<int>(enc.dimension()), 2, cfg);
  std::vector<double> analytic;
  net.batch_gradient(X, y, analytic);

  auto& params = net.parameters();
  const double h = 1e-5;
  double err_sq = 0.0, norm_a = 0.0, norm_n = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + h;
    const double up = net.batch_loss(X, y);
    params[p] = saved - h;
    const double down = net.batch_loss(X, y);
    params[p] = saved;
    const double numeric = (up - down) / (2.0 * h);
    err_sq += (analytic[p] - numeric) * (analytic[p] - numeric);
    norm_a += analytic[p] * analytic[p];
    norm_n += numeric * numeric;
  }
  const double rel =
      std::sqrt(err_sq) / std::max({std::sqrt(norm_a), std::sqrt(norm_n), 1e-12});
  c.expect(rel < 1e-4, "relative gradient error " + std::to_string(rel) + " >= 1e-4");
}

void coreset_planting(Checker& c) {
  Dataset ds = testutil::blobs(500, 21, 0.5);
  ProbeConfig cfg;  // defaults: 100 epochs, attention front layer
  cfg.seed = 9;

  // flip 10% of labels (25 per class) from the start of the mid phase
  LabelFlipSchedule flips;
  flips.from_epoch = cfg.epochs / 3 + 1;
  std::set<std::size_t> flipped;
  Rng rng(13);
  std::size_t per_class[2] = {0, 0};
  while (flipped.size() < 50) {
    const std::size_t idx = rng.below(500);
    const auto cls = static_cast<std::size_t>(ds.rows[idx].label);
    if (per_class[cls] >= 25 || flipped.count(idx)) continue;
    flipped.insert(idx);
    ++per_class[cls];
  }
  for (auto idx : flipped) flips.flips.emplace_back(idx, 1 - ds.rows[idx].label);

  const auto trace = train_probe(ds, cfg, &flips);
  const auto scores = per_sample_variance(trace);

  double flipped_mean = 0.0, clean_mean = 0.0;
  for (std::size_t i = 0; i < 500; ++i)
    (flipped.count(i) ? flipped_mean : clean_mean) += scores.values[i];
  flipped_mean /= 50.0;
  clean_mean /= 450.0;
  c.expect(flipped_mean > clean_mean,
           "flipped mean variance " + std::to_string(flipped_mean) +
               " must exceed clean mean " + std::to_string(clean_mean));

  const auto core = select_coreset(ds, scores, 25);
  std::size_t flipped_selected = 0;
  for (const auto& cls : core.per_class)
    for (auto idx : cls) flipped_selected += flipped.count(idx);
  c.expect(flipped_selected >= 30,  // >= 60% of the 50 selected
           "only " + std::to_string(flipped_selected) + "/50 selected rows were flipped");
}

void feedback_loop_convergence(Checker& c) {
  const Dataset full = generate_benchmark(BenchmarkName::real_estate, 1000, 0);
  auto [train, test] = train_test_split(full, 0.8, 42);
  (void)test;

  PipelineConfig cfg;
  cfg.n_target = 200;
  cfg.reference_batch_size = 30;
  cfg.coreset_k = 25;
  cfg.seed = 7;
  cfg.probe.epochs = 30;
  cfg.probe.hidden = {16, 8};
  cfg.probe.seed = 7;
  cfg.mock.seed = 7;

  MockGateway gateway(train.schema, make_run_codes(train.schema, cfg), cfg.mock);
  const RunReport report = run_pipeline(train, cfg, gateway);

  c.expect(report.quality_trajectory.size() == report.iterations,
           "quality trajectory must be recorded per batch");
  c.expect(report.iterations >= 5, "expected at least 5 batches");

  const double tau = cfg.thresholds.mean;  // 0.10
  bool any_trigger = false;
  const std::size_t n_attrs = report.quality_trajectory[0].attributes.size();
  for (std::size_t a = 0; a < n_attrs; ++a) {
    for (std::size_t i = 0; i < report.quality_trajectory.size(); ++i) {
      if (report.quality_trajectory[i].attributes[a].mean_diff <= tau) continue;
      any_trigger = true;  // a mean directive fired at batch i+1
      bool fell = false;
      for (std::size_t j = i + 1;
           j <= std::min(i + 5, report.quality_trajectory.size() - 1); ++j)
        fell = fell ||
               report.quality_trajectory[j].attributes[a].mean_diff < tau;
      c.expect(fell, "attribute " + report.quality_trajectory[i].attributes[a].attribute +
                         " triggered at batch " + std::to_string(i + 1) +
                         " and never fell below tau within 5 batches");
      break;  // only the first trigger per attribute needs the window check
    }
  }
  c.expect(any_trigger, "the initial mock distortion must trigger at least one mean directive");
}

void proposition_simulator(Checker& c) {
  AscentSpec spec;
  spec.target = 2.0;
  spec.curvature = 1.0;
  spec.noise_sigma = 1.0;
  spec.lower = -10.0;
  spec.upper = 10.0;
  spec.start = -5.0;
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    total += std::fabs(simulate_calibration(spec, StepRule(1.0, 1.0), 10000, seed).final_value() -
                       2.0);
  c.expect(total / 20.0 < 0.05,
           "mean |phi_T - 2| = " + std::to_string(total / 20.0) + " >= 0.05");

  bool rejected = false;
  try {
    StepRule constant(0.1, 0.0);
    (void)constant;
  } catch (const ConfigError&) {
    rejected = true;
  }
  c.expect(rejected, "constant step size must be rejected at construction");
}

// Published example blocks: Travel and Thyroid outputs with coded values.
Schema accept_travel_schema() {
  Schema s;
  s.attributes = {
      {"Churn", AttributeKind::categorical, "churn label", {"0", "1"}},
      {"Age", AttributeKind::numeric, "customer age", {}},
      {"FrequentFlyer", AttributeKind::categorical, "frequent flyer", {"yes", "no"}},
      {"AnnualIncomeClass", AttributeKind::categorical, "income class",
       {"Low Income", "Middle Income", "High Income"}},
      {"ServicesOpted", AttributeKind::numeric, "services opted", {}},
      {"AccountSyncedToSocialMedia", AttributeKind::categorical, "synced", {"yes", "no"}},
      {"BookedHotelOrNot", AttributeKind::categorical, "hotel booked", {"yes", "no"}},
  };
  s.label = "Churn";
  s.classes = {"0", "1"};
  return s;
}

void parser_round_trip(Checker& c) {
  const Schema travel = accept_travel_schema();
  const auto travel_codes = ClassCodeMap::from_table(
      travel, {{"Churn", {{"0", "IHU"}, {"1", "HRL"}}},
               {"FrequentFlyer", {{"yes", "YMP"}, {"no", "YBW"}}},
               {"AnnualIncomeClass",
                {{"Low Income", "T6L"}, {"Middle Income", "OI8"}, {"High Income", "CL2"}}},
               {"AccountSyncedToSocialMedia", {{"yes", "QQ1"}, {"no", "NXU"}}},
               {"BookedHotelOrNot", {{"yes", "U0X"}, {"no", "EUA"}}}});
  const char* travel_block =
      "Churn Age FrequentFlyer AnnualIncomeClass ServicesOpted AccountSyncedToSocialMedia "
      "BookedHotelOrNot\n"
      "A.\nIHU,30.0,YMP,CL2,4.0,NXU,U0X\nIHU,31.0,YBW,OI8,2.0,NXU,EUA\n"
      "B.\nHRL,29.0,YMP,T6L,2.0,NXU,EUA\nHRL,31.0,YBW,CL2,4.0,NXU,U0X\n";

  auto cat = [](std::string name, std::vector<std::string> values) {
    return AttributeSpec{std::move(name), AttributeKind::categorical, "attr", std::move(values)};
  };
  Schema thyroid;
  thyroid.attributes = {
      cat("Recurred", {"No", "Yes"}),
      {"Age", AttributeKind::numeric, "age", {}},
      cat("Gender", {"F", "M"}),
      cat("Smoking", {"No", "Yes"}),
      cat("Hx Smoking", {"No", "Yes"}),
      cat("Hx Radiotherapy", {"No", "Yes"}),
      cat("Thyroid Function", {"Euthyroid", "Clinical Hyperthyroidism"}),
      cat("Physical Examination", {"Single nodular goiter-left", "Multinodular goiter"}),
      cat("Adenopathy", {"No", "Right"}),
      cat("Pathology", {"Micropapillary", "Papillary"}),
      cat("Focality", {"Uni-Focal", "Multi-Focal"}),
      cat("Risk", {"Low", "Intermediate"}),
      cat("T", {"T1a", "T2"}),
      cat("N", {"N0", "N1b"}),
      cat("M", {"M0", "M1"}),
      cat("Stage", {"I", "II"}),
      cat("Response", {"Excellent", "Indeterminate", "Structural Incomplete"}),
  };
  thyroid.label = "Recurred";
  thyroid.classes = {"No", "Yes"};
  const auto thyroid_codes = ClassCodeMap::from_table(
      thyroid,
      {{"Recurred", {{"No", "A8O"}, {"Yes", "N5Q"}}},
       {"Gender", {{"F", "A6I"}, {"M", "LPT"}}},
       {"Smoking", {{"No", "GQP"}, {"Yes", "W6O"}}},
       {"Hx Smoking", {{"No", "Z2Y"}, {"Yes", "K77"}}},
       {"Hx Radiotherapy", {{"No", "BFG"}, {"Yes", "J2M"}}},
       {"Thyroid Function", {{"Euthyroid", "BMN"}, {"Clinical Hyperthyroidism", "HLJ"}}},
       {"Physical Examination",
        {{"Single nodular goiter-left", "KMR"}, {"Multinodular goiter", "MQ8"}}},
       {"Adenopathy", {{"No", "P1R"}, {"Right", "R55"}}},
       {"Pathology", {{"Micropapillary", "VDC"}, {"Papillary", "PP3"}}},
       {"Focality", {{"Uni-Focal", "IOU"}, {"Multi-Focal", "UE4"}}},
       {"Risk", {{"Low", "EOT"}, {"Intermediate", "HGR"}}},
       {"T", {{"T1a", "B8U"}, {"T2", "T22"}}},
       {"N", {{"N0", "OLC"}, {"N1b", "T47"}}},
       {"M", {{"M0", "QA8"}, {"M1", "M11"}}},
       {"Stage", {{"I", "WY1"}, {"II", "S22"}}},
       {"Response",
        {{"Excellent", "I8L"}, {"Indeterminate", "LSU"}, {"Structural Incomplete", "GC4"}}}});
  const char* thyroid_block =
      "Recurred, Age, Gender, Smoking, Hx Smoking, Hx Radiotherapy, Thyroid Function, "
      "Physical Examination, Adenopathy, Pathology, Focality, Risk, T, N, M, Stage, Response\n"
      "A.\n"
      "A8O,39,A6I,GQP,Z2Y,BFG,BMN,KMR,P1R,VDC,IOU,EOT,B8U,OLC,QA8,WY1,I8L\n"
      "A8O,26,LPT,GQP,Z2Y,BFG,HLJ,KMR,P1R,VDC,UE4,EOT,B8U,T47,QA8,WY1,I8L\n"
      "B.\n"
      "N5Q,53,LPT,W6O,Z2Y,BFG,BMN,MQ8,P1R,VDC,UE4,HGR,B8U,T47,QA8,WY1,GC4\n"
      "N5Q,35,A6I,GQP,Z2Y,BFG,BMN,MQ8,P1R,VDC,IOU,EOT,B8U,OLC,QA8,WY1,LSU\n";

  struct Case {
    const Schema* schema;
    const ClassCodeMap* codes;
    const char* block;
    const char* name;
  };
  const Case cases[] = {{&travel, &travel_codes, travel_block, "Travel"},
                        {&thyroid, &thyroid_codes, thyroid_block, "Thyroid"}};
  for (const auto& tc : cases) {
    const auto parsed = parse_generated_rows(tc.block, *tc.schema, *tc.codes);
    c.expect(parsed.rejected.empty(),
             std::string(tc.name) + ": expected 0 rejects, got " +
                 std::to_string(parsed.rejected.size()) +
                 (parsed.rejected.empty() ? "" : " (first: " + parsed.rejected[0].reason + ")"));
    c.expect(parsed.accepted.size() == 4,
             std::string(tc.name) + ": expected 4 rows, got " +
                 std::to_string(parsed.accepted.size()));
    const std::string rendered = render_class_sections(*tc.schema, parsed.accepted, *tc.codes);
    const auto again = parse_generated_rows(rendered, *tc.schema, *tc.codes);
    c.expect(again.accepted == parsed.accepted,
             std::string(tc.name) + ": re-render then re-parse must be the identity");
    c.expect(again.rejected.empty(), std::string(tc.name) + ": re-parse must not reject");
  }
}

void algorithm_conformance(Checker& c) {
  Dataset train = testutil::blobs(90, 5);
  PipelineConfig cfg;
  cfg.n_target = 210;  // 7 iterations of 30 accepted rows over m=3 batches
  cfg.reference_batch_size = 30;
  cfg.coreset_k = 10;
  cfg.seed = 7;
  cfg.probe.epochs = 9;
  cfg.probe.hidden = {8, 4};
  cfg.probe.seed = 7;
  cfg.mock.seed = 7;
  testutil::TempDir dir("acceptance_alg1");
  cfg.transcript_path = dir.file("t.jsonl");

  MockGateway gateway(train.schema, make_run_codes(train.schema, cfg), cfg.mock);
  const RunReport report = run_pipeline(train, cfg, gateway);
  c.expect(report.iterations == 7, "expected exactly 7 generation iterations");

  std::ifstream in(cfg.transcript_path);
  std::vector<int> cursor_trace;
  std::vector<std::string> prompts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto e = nlohmann::json::parse(line);
    if (e.value("kind", "") != "exchange" || e["phase"] != "generation") continue;
    cursor_trace.push_back(e["batch"].get<int>());
    prompts.push_back(e["messages"][1]["content"].get<std::string>());
  }
  c.expect(cursor_trace == std::vector<int>{1, 2, 3, 1, 2, 3, 1},
           "cursor trace must cycle 1,2,3,1,2,3,1");
  c.expect(prompts.size() == 7, "expected 7 recorded generation prompts");

  // F0 is empty; the prompt for batch i embeds exactly F_{i-1}
  const std::string header = kFeedbackReportHeader;
  c.expect(prompts[0].find(header) == std::string::npos,
           "the first generation prompt must not carry a quality report");
  const BatchPlan plan = reference_plan(train, cfg.reference_batch_size);
  BatchPlan walker = plan;
  for (std::size_t i = 1; i < prompts.size(); ++i) {
    // recompute F_{i-1} from the recorded quality of batch i-1 and the
    // targets of the batch the prompt embeds
    walker.cursor = static_cast<std::size_t>(cursor_trace[i]);
    const FeedbackTargets targets =
        FeedbackTargets::from_batch(train.subset(walker.current()));
    const FeedbackReport expected =
        create_feedback(report.quality_trajectory[i - 1], cfg.thresholds, targets);
    if (expected.empty()) {
      c.expect(prompts[i].find(header) == std::string::npos,
               "prompt " + std::to_string(i + 1) + " must carry no report when F is empty");
    } else {
      c.expect(prompts[i].find(expected.rendered) != std::string::npos,
               "prompt " + std::to_string(i + 1) + " must embed F_" + std::to_string(i));
      const auto first = prompts[i].find(header);
      c.expect(first != std::string::npos && prompts[i].find(header, first + 1) ==
                                                 std::string::npos,
               "prompt " + std::to_string(i + 1) + " must embed exactly one report");
    }
  }
}

void augmentation_property(Checker& c) {
  const Dataset full = generate_benchmark(BenchmarkName::real_estate, 1000, 0);
  auto [train, test] = train_test_split(full, 0.8, 42);
  const auto ir = class_stats(full).imbalance_ratio;
  c.expect(ir > 3.0 && ir < 4.5, "real_estate imbalance ratio should sit near 3.7");

  PipelineConfig cfg;
  cfg.n_target = 1000;
  cfg.reference_batch_size = 30;
  cfg.coreset_k = 25;
  cfg.seed = 1;
  cfg.probe.epochs = 30;
  cfg.probe.hidden = {16, 8};
  cfg.probe.seed = 1;
  cfg.mock.seed = 1;

  MockGateway gateway(train.schema, make_run_codes(train.schema, cfg), cfg.mock);
  const RunReport report = run_pipeline(train, cfg, gateway);

  const MetricTable table = evaluate_augmentation(train, report.synthetic, test,
                                                  {ClassifierKind::logistic}, {1, 2, 3, 4, 5});
  const auto& original = table.conditions[0].runs;
  const auto& augmented = table.conditions[1].runs;
  int wins = 0;
  for (std::size_t i = 0; i < original.size(); ++i)
    wins += augmented[i].sensitivity >= original[i].sensitivity;
  c.expect(wins >= 4, "augmented sensitivity >= original in only " + std::to_string(wins) +
                          "/5 seeds");
}

void reproducibility(Checker& c) {
  const Dataset full = generate_benchmark(BenchmarkName::real_estate, 400, 0);
  auto [train, test] = train_test_split(full, 0.8, 42);
  testutil::TempDir dir("acceptance_repro");

  auto run_once = [&](const std::string& transcript) {
    PipelineConfig cfg;
    cfg.n_target = 90;
    cfg.reference_batch_size = 30;
    cfg.coreset_k = 10;
    cfg.seed = 5;
    cfg.probe.epochs = 12;
    cfg.probe.hidden = {8, 4};
    cfg.probe.seed = 5;
    cfg.mock.seed = 5;
    cfg.transcript_path = transcript;
    MockGateway gateway(train.schema, make_run_codes(train.schema, cfg), cfg.mock);
    const RunReport report = run_pipeline(train, cfg, gateway);

    std::map<std::string, std::string> artifacts;
    artifacts["synthetic.csv"] = to_csv_string(report.synthetic);
    artifacts["fidelity.json"] = fidelity_report_json(fidelity_report(train, report.synthetic));
    artifacts["metrics.json"] =
        evaluate_augmentation(train, report.synthetic, test, {ClassifierKind::logistic}, {1, 2, 3})
            .to_json();
    artifacts["run_report.json"] = report.to_json();
    return artifacts;
  };

  const auto first = run_once(dir.file("one.jsonl"));
  const auto second = run_once(dir.file("two.jsonl"));
  c.expect(first.at("synthetic.csv") == second.at("synthetic.csv"),
           "synthetic csv must be byte-identical across identical runs");
  c.expect(first.at("fidelity.json") == second.at("fidelity.json"),
           "fidelity json must be byte-identical");
  c.expect(first.at("metrics.json") == second.at("metrics.json"),
           "metrics json must be byte-identical");

  // replay substitutes the transport and reproduces the run report exactly
  PipelineConfig cfg;
  cfg.n_target = 90;
  cfg.reference_batch_size = 30;
  cfg.coreset_k = 10;
  cfg.seed = 5;
  cfg.probe.epochs = 12;
  cfg.probe.hidden = {8, 4};
  cfg.probe.seed = 5;
  cfg.mock.seed = 5;
  ReplayGateway replay(dir.file("one.jsonl"));
  const RunReport replayed = run_pipeline(train, cfg, replay);
  c.expect(replayed.to_json() == first.at("run_report.json"),
           "replayed run report must equal the original byte for byte");
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion(1, "metric oracles match naive re-implementations", 10.0, metric_oracles);
  criterion(2, "hand-value checks", 10.0, hand_values);
  criterion(3, "probe gradients match central finite differences", 5.0, gradient_check);
  criterion(4, "mid-training label flips dominate the core set", 60.0, coreset_planting);
  criterion(5, "feedback loop converges under the mock gateway", 30.0, feedback_loop_convergence);
  criterion(6, "projected supergradient ascent simulator", 10.0, proposition_simulator);
  criterion(7, "published output blocks parse and round-trip", 10.0, parser_round_trip);
  criterion(8, "batch cursor and feedback threading follow the algorithm", 30.0,
            algorithm_conformance);
  criterion(9, "augmentation keeps or improves minority sensitivity", 60.0,
            augmentation_property);
  criterion(10, "byte-identical reruns and exact replay", 60.0, reproducibility);
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
