#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "bilingual_fixture.hpp"
#include "test_support.hpp"

using namespace kgalign;

namespace {

const std::string kDir = kgtest::fixture("bilingual");

}  // namespace

TEST_CASE("a single full arm equals a direct run") {
  auto fx = kgtest::load_bilingual(kDir);
  auto cfg = kgtest::bilingual_config();
  cfg.matcher.theta = 0.75;  // drops some gold pairs so the metrics are not all 1
  auto direct = score(run_pipeline(fx.en, fx.de, cfg).result.alignment, fx.gold);
  auto rows = run_ablation(fx.en, fx.de, cfg, {AblationArm::Full}, fx.gold);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].arm == "full");
  CHECK(rows[0].metrics.precision == direct.precision);
  CHECK(rows[0].metrics.recall == direct.recall);
  CHECK(rows[0].metrics.f1 == direct.f1);
  CHECK(direct.recall < 1.0);
}

TEST_CASE("arm names") {
  for (auto arm : {AblationArm::Full, AblationArm::NoVerbalization, AblationArm::NoTypeConstraints,
                   AblationArm::NoMutualTopK, AblationArm::NoOneToOne, AblationArm::NoReasonerContext})
    CHECK(parse_arm(arm_name(arm)) == arm);
  CHECK(arm_name(AblationArm::NoMutualTopK) == "no_mutual_topk");
  try {
    parse_arm("no_magic");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("no_magic") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_arms({"full", "no_magic"}), ConfigError);
}

TEST_CASE("arms map to toggles") {
  PipelineConfig base;
  CHECK(apply_arm(base, AblationArm::NoVerbalization).verbalizer.templates == TemplateSet::LabelOnly);
  CHECK_FALSE(apply_arm(base, AblationArm::NoTypeConstraints).matcher.enforce_types);
  CHECK_FALSE(apply_arm(base, AblationArm::NoMutualTopK).matcher.mutual_topk);
  CHECK_FALSE(apply_arm(base, AblationArm::NoOneToOne).matcher.enforce_one_to_one);
  CHECK_FALSE(apply_arm(base, AblationArm::NoReasonerContext).verbalizer.use_inferred_context);
  auto full = apply_arm(base, AblationArm::Full);
  CHECK(full.matcher.mutual_topk);
  CHECK(full.verbalizer.templates == TemplateSet::Contextual);
}

TEST_CASE("ablation needs gold") {
  auto fx = kgtest::load_bilingual(kDir);
  CHECK_THROWS_AS(run_ablation(fx.en, fx.de, kgtest::bilingual_config(), {AblationArm::Full}, GoldAlignment{}),
                  EmptyGold);
}

TEST_CASE("stage timings and texts") {
  auto fx = kgtest::load_bilingual(kDir);
  auto run = run_pipeline(fx.en, fx.de, kgtest::bilingual_config());
  std::vector<std::string> stages;
  for (const auto& t : run.timings) stages.push_back(t.stage);
  CHECK(stages == std::vector<std::string>{"verbalize", "embed", "align"});
  CHECK(run.source_texts.size() == 6);
  CHECK(run.source_embeddings.rows() == 6);
  CHECK(run.target_embeddings.dim == 384);
}

TEST_CASE("an empty side yields an empty alignment") {
  auto fx = kgtest::load_bilingual(kDir);
  PreparedSide empty{compute_closure(Ontology{}), {"en"}};
  auto run = run_pipeline(fx.en, empty, kgtest::bilingual_config());
  CHECK(run.result.alignment.cells.empty());
  auto m = evaluate(run, fx.gold);
  CHECK(m.recall == 0.0);
}

TEST_CASE("approximate path still reports ranked metrics") {
  auto fx = kgtest::load_bilingual(kDir);
  auto cfg = kgtest::bilingual_config();
  cfg.matcher.ann = AnnSettings{1, 6, 0, 0};
  auto run = run_pipeline(fx.en, fx.de, cfg);
  CHECK(run.result.counts.used_ann);
  auto m = evaluate(run, fx.gold);
  REQUIRE(m.ranked.has_value());
  auto exact = evaluate(run_pipeline(fx.en, fx.de, kgtest::bilingual_config()), fx.gold);
  CHECK(m.ranked->mrr == doctest::Approx(exact.ranked->mrr));
  CHECK(m.f1 == exact.f1);
}

TEST_CASE("metrics outputs") {
  Metrics m;
  m.precision = 0.5;
  m.recall = 0.25;
  m.f1 = f1_score(0.5, 0.25);
  m.true_pos = 1;
  m.false_pos = 1;
  m.false_neg = 3;
  m.ranked = RankedMetrics{0.25, 0.5, 4};
  std::vector<AblationRow> rows{{"full", m}, {"no_verbalization", Metrics{}}};

  std::ostringstream jsonl;
  write_metrics_jsonl(jsonl, rows);
  std::istringstream lines(jsonl.str());
  std::string line;
  std::vector<nlohmann::json> parsed;
  while (std::getline(lines, line)) parsed.push_back(nlohmann::json::parse(line));
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0]["arm"] == "full");
  CHECK(parsed[0]["precision"].get<double>() == 0.5);
  CHECK(parsed[0]["f1"].get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(parsed[0]["mrr"].get<double>() == 0.5);
  CHECK(parsed[0]["false_neg"].get<int>() == 3);
  CHECK(parsed[1]["arm"] == "no_verbalization");

  std::ostringstream table;
  write_metrics_table(table, rows);
  CHECK(table.str().find("no_verbalization") != std::string::npos);
  CHECK(table.str().find("0.3333") != std::string::npos);
}
