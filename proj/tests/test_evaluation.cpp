#include <doctest.h>

#include <algorithm>
#include <set>

#include "egosum/evaluation.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace egosum;

namespace {

EventSegmentation from_lengths(const std::vector<std::size_t>& lengths) {
  EventSegmentation seg;
  std::size_t start = 0;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    seg.events.push_back({k, start, start + lengths[k] - 1});
    start += lengths[k];
  }
  return seg;
}

EventSegmentation random_segmentation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> lengths;
  std::size_t left = n;
  while (left > 0) {
    const std::size_t len = 1 + rng() % std::min<std::size_t>(left, 12);
    lengths.push_back(len);
    left -= len;
  }
  return from_lengths(lengths);
}

// Set-based reference: scan every ground-truth segment, keep the first maximum.
double brute_force_jaccard(const EventSegmentation& pred, const EventSegmentation& gt) {
  double total = 0.0;
  for (const auto& e : pred.events) {
    std::set<std::size_t> a;
    for (std::size_t f = e.start_index; f <= e.end_index; ++f) a.insert(f);
    std::size_t best_inter = 0, best_union = 1;
    bool first = true;
    for (const auto& g : gt.events) {
      std::set<std::size_t> uni = a;
      std::size_t inter = 0;
      for (std::size_t f = g.start_index; f <= g.end_index; ++f) {
        inter += a.count(f);
        uni.insert(f);
      }
      if (first || inter > best_inter) {
        first = false;
        best_inter = inter;
        best_union = uni.size();
      }
    }
    total += static_cast<double>(best_inter) / static_cast<double>(best_union);
  }
  return total / static_cast<double>(pred.size());
}

}  // namespace

TEST_CASE("jaccard of identical segmentations is one") {
  const auto seg = from_lengths({3, 5, 2});
  const auto report = jaccard(seg, seg);
  CHECK(report.aggregate == 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(report.indicator(i, j) == (i == j));
  }
}

TEST_CASE("jaccard: one event over two halves") {
  const auto report = jaccard(from_lengths({10}), from_lengths({5, 5}));
  CHECK(report.aggregate == 0.5);
  CHECK(report.matches[0].ground_truth == 0);  // tie on intersection goes to the first segment
  CHECK(report.matches[0].intersection == 5);
  CHECK(report.matches[0].union_size == 10);
}

TEST_CASE("jaccard: singletons against one event and the reverse") {
  const std::size_t n = 7;
  const auto whole = from_lengths({n});
  const auto singles = from_lengths(std::vector<std::size_t>(n, 1));
  CHECK(jaccard(whole, singles).aggregate == doctest::Approx(1.0 / n).epsilon(1e-15));
  CHECK(jaccard(singles, whole).aggregate == doctest::Approx(1.0 / n).epsilon(1e-15));
  CHECK(jaccard(singles, whole).detected_count == n);
  CHECK(jaccard(singles, whole).ground_truth_count == 1);
}

TEST_CASE("jaccard ignores event ids") {
  auto renamed = from_lengths({4, 4, 2});
  renamed.events[0].event_id = 90;
  renamed.events[1].event_id = 3;
  renamed.events[2].event_id = 41;
  const auto gt = from_lengths({3, 3, 4});
  CHECK(jaccard(renamed, gt).aggregate == jaccard(from_lengths({4, 4, 2}), gt).aggregate);
}

TEST_CASE("jaccard rejects mismatched frame ranges") {
  CHECK_THROWS_AS(jaccard(from_lengths({4}), from_lengths({5})), ValidationError);
}

TEST_CASE("property: jaccard agrees with the set-based reference and stays in (0, 1]") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    const auto pred = random_segmentation(rng, n);
    const auto gt = random_segmentation(rng, n);
    const auto report = jaccard(pred, gt);
    CHECK(report.aggregate > 0.0);
    CHECK(report.aggregate <= 1.0);
    CHECK(std::abs(report.aggregate - brute_force_jaccard(pred, gt)) <= 1e-12);
    CHECK(jaccard(gt, gt).aggregate == 1.0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      std::size_t ones = 0;
      for (std::size_t j = 0; j < gt.size(); ++j) ones += report.indicator(i, j);
      CHECK(ones == 1);
    }
  }
}

TEST_CASE("jaccard report as JSON") {
  const auto pred = from_lengths({10});
  const auto gt = from_lengths({5, 5});
  const auto doc = to_json(jaccard(pred, gt), pred, gt);
  CHECK(doc["aggregate"] == 0.5);
  CHECK(doc["detected_events"] == 1);
  CHECK(doc["ground_truth_events"] == 2);
}

TEST_CASE("synthetic generator is deterministic and well formed") {
  SynthConfig config;
  config.seed = 5;
  const auto a = synth_generate(config);
  const auto b = synth_generate(config);
  CHECK(a.stream == b.stream);
  CHECK(a.ground_truth == b.ground_truth);
  CHECK(a.stream.size() == 100);
  CHECK(a.stream.dimension() == 64);
  CHECK(a.ground_truth.size() == 5);
  CHECK_NOTHROW(validate_segmentation(a.ground_truth, a.stream.size()));
  CHECK(seconds_between(a.stream[0].timestamp, a.stream[1].timestamp) == 30.0);

  config.seed = 6;
  CHECK_FALSE(synth_generate(config).stream == a.stream);
}

TEST_CASE("synthetic clusters sit at the requested scales") {
  SynthConfig config;
  config.seed = 1;
  const auto day = synth_generate(config);
  const auto d = pairwise_distances(day.stream);
  const auto labels = labels_from_segmentation(day.ground_truth);
  double intra_max = 0.0, inter_min = 1e300;
  for (std::size_t i = 0; i < day.stream.size(); ++i) {
    for (std::size_t j = i + 1; j < day.stream.size(); ++j) {
      if (labels[i] == labels[j]) {
        intra_max = std::max(intra_max, d(i, j));
      } else {
        inter_min = std::min(inter_min, d(i, j));
      }
    }
  }
  CHECK(intra_max < 3.0);
  CHECK(inter_min > 6.0);
}

TEST_CASE("synthetic edge cases") {
  SynthConfig config;
  config.num_events = 1;
  const auto one = synth_generate(config);
  CHECK(one.ground_truth.size() == 1);
  CHECK(jaccard(refine(segment(one.stream), one.stream), one.ground_truth).aggregate == 1.0);

  config = {};
  config.noise_sigma = 1e-9;
  config.separation = 1e9;  // centres far apart relative to the vanishing noise
  const auto tight = synth_generate(config);
  const auto sweep = std::vector<double>{1e-3};
  CHECK(sweep_cutoff(tight.stream, tight.ground_truth, LinkageMethod::kAverage, sweep)[0].aggregate == 1.0);

  config = {};
  config.min_frames_per_event = 10;
  config.max_frames_per_event = 30;
  config.seed = 3;
  const auto varied = synth_generate(config);
  for (const auto& e : varied.ground_truth.events) {
    CHECK(e.frame_count() >= 10);
    CHECK(e.frame_count() <= 30);
  }

  config = {};
  config.noise_frames = 3;
  const auto noisy = synth_generate(config);
  CHECK(noisy.noise_frame_indices.size() == 3);
  CHECK(noisy.ground_truth == synth_generate(SynthConfig{}).ground_truth);

  config = {};
  config.num_events = 0;
  CHECK_THROWS_AS(synth_generate(config), ValidationError);
}

TEST_CASE("synth config from JSON") {
  const auto config = synth_config_from_json(
      nlohmann::json::parse(R"({"num_events": 3, "frames_per_event": [4, 9], "seed": 11})"));
  CHECK(config.num_events == 3);
  CHECK(config.min_frames_per_event == 4);
  CHECK(config.max_frames_per_event == 9);
  CHECK(config.seed == 11);
  CHECK(config.dimension == 64);

  const auto fixed = synth_config_from_json(nlohmann::json::parse(R"({"frames_per_event": 12})"));
  CHECK(fixed.min_frames_per_event == 12);
  CHECK(fixed.max_frames_per_event == 12);
  CHECK_THROWS_AS(synth_config_from_json(nlohmann::json::parse(R"({"dimension": "wide"})")), ValidationError);
}

TEST_CASE("sweep over cutoffs") {
  SUBCASE("single cutoff gives one row") {
    const auto day = synth_generate({});
    const std::vector<double> cutoffs{5.0};
    const auto rows = sweep_cutoff(day.stream, day.ground_truth, LinkageMethod::kAverage, cutoffs);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].cutoff == 5.0);
    CHECK(rows[0].events == 5);
    CHECK(rows[0].aggregate == 1.0);
  }
  SUBCASE("identical frames score the same at every cutoff") {
    const auto stream = egosum::testing::make_stream(std::vector<std::vector<double>>(12, {1.0, 2.0}));
    const EventSegmentation gt{{{0, 0, 5}, {1, 6, 11}}};
    const std::vector<double> cutoffs{0.1, 1.0, 10.0};
    const auto rows = sweep_cutoff(stream, gt, LinkageMethod::kAverage, cutoffs);
    for (const auto& r : rows) {
      CHECK(r.aggregate == rows[0].aggregate);
      CHECK(r.events == 1);
    }
  }
  SUBCASE("score peaks between the noise and separation scales") {
    SynthConfig config;
    config.seed = 2;
    const auto day = synth_generate(config);
    const std::vector<double> cutoffs{0.01, 5.0, 1000.0};
    const auto rows = sweep_cutoff(day.stream, day.ground_truth, LinkageMethod::kAverage, cutoffs);
    CHECK(rows[1].aggregate > rows[0].aggregate);
    CHECK(rows[1].aggregate > rows[2].aggregate);
    CHECK(rows[2].events == 1);
    CHECK(rows[2].aggregate == doctest::Approx(0.2));

    const auto csv = sweep_to_csv(rows);
    CHECK(csv.rfind("cutoff,jaccard,events\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }
}

TEST_CASE("cutoff lists") {
  const auto range = parse_cutoff_list("0.5:0.1:1.0");
  REQUIRE(range.size() == 6);
  CHECK(range.back() == doctest::Approx(1.0));
  CHECK(parse_cutoff_list("1,2.5,3") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(parse_cutoff_list("1.154") == std::vector<double>{1.154});
  CHECK_THROWS_AS(parse_cutoff_list("1,x"), ValidationError);
  CHECK_THROWS_AS(parse_cutoff_list("2:0:3"), ValidationError);
  CHECK_THROWS_AS(parse_cutoff_list("0,1"), ValidationError);
  CHECK_THROWS_AS(parse_cutoff_list("1:2"), ValidationError);
}

TEST_CASE("division against division plus fusion") {
  SUBCASE("noise frames split events until fusion absorbs them") {
    SynthConfig config;
    config.noise_frames = 4;
    config.seed = 9;
    const auto day = synth_generate(config);
    const auto cmp = compare_division_fusion(day.stream, day.ground_truth, LinkageMethod::kAverage, 5.0);
    CHECK(cmp.with_refine == 1.0);
    CHECK(cmp.without_refine < cmp.with_refine);
  }
  SUBCASE("a clean day is unchanged by fusion") {
    const auto day = synth_generate({});
    const auto cmp = compare_division_fusion(day.stream, day.ground_truth, LinkageMethod::kAverage, 5.0);
    CHECK(cmp.without_refine == 1.0);
    CHECK(cmp.with_refine == 1.0);
  }
}
