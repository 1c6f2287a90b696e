#include "kgalign/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <json.hpp>
#include <map>
#include <ostream>

#include "kgalign/errors.hpp"

namespace kgalign {
namespace {

using Clock = std::chrono::steady_clock;

std::vector<KeyedText> keyed(const std::vector<Verbalization>& vs) {
  std::vector<KeyedText> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.emplace_back(v.entity, v.text);
  return out;
}

}  // namespace

PipelineRun run_pipeline(const PreparedSide& source, const PreparedSide& target,
                         const PipelineConfig& config) {
  config.matcher.validate();
  PipelineRun run;
  auto mark = [&, t = Clock::now()](const char* stage) mutable {
    auto now = Clock::now();
    run.timings.push_back({stage, now - t});
    t = now;
  };

  run.source_texts = verbalize_all(source.inferred, source.languages, config.verbalizer);
  run.target_texts = verbalize_all(target.inferred, target.languages, config.verbalizer);
  mark("verbalize");

  if (run.source_texts.empty() || run.target_texts.empty()) {
    SimilarityMatrix empty;
    for (const auto& v : run.source_texts) empty.source_keys.push_back(v.entity);
    for (const auto& v : run.target_texts) empty.target_keys.push_back(v.entity);
    empty.scores.assign(empty.rows() * empty.cols(), 0.0);
    run.result.matrix = std::move(empty);
    return run;
  }
  auto provider = make_provider(config.provider);
  auto src_items = keyed(run.source_texts);
  auto tgt_items = keyed(run.target_texts);
  run.source_embeddings = provider->embed(src_items);
  run.target_embeddings = provider->embed(tgt_items);
  mark("embed");

  run.result = align({&source.inferred, &run.source_embeddings},
                     {&target.inferred, &run.target_embeddings}, config.matcher);
  mark("align");
  return run;
}

Metrics evaluate(const PipelineRun& run, const GoldAlignment& gold) {
  Metrics m = score(run.result.alignment, gold);
  if (run.result.matrix) {
    m.ranked = score_ranked(*run.result.matrix, gold);
  } else {
    // Approximate run: rank against exact scores for the gold source rows only.
    std::map<Iri, std::size_t> row_of;
    for (std::size_t i = 0; i < run.source_embeddings.rows(); ++i)
      row_of.emplace(run.source_embeddings.row_keys[i], i);
    std::vector<std::size_t> rows;
    for (const auto& [s, t] : gold.pairs) {
      auto it = row_of.find(s);
      if (it == row_of.end()) throw MissingEntity(s.str());
      rows.push_back(it->second);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    m.ranked = score_ranked(similarity_rows(run.source_embeddings, run.target_embeddings, rows), gold);
  }
  return m;
}

std::string_view arm_name(AblationArm arm) {
  switch (arm) {
    case AblationArm::Full: return "full";
    case AblationArm::NoVerbalization: return "no_verbalization";
    case AblationArm::NoTypeConstraints: return "no_type_constraints";
    case AblationArm::NoMutualTopK: return "no_mutual_topk";
    case AblationArm::NoOneToOne: return "no_one_to_one";
    case AblationArm::NoReasonerContext: return "no_reasoner_context";
  }
  return "full";
}

AblationArm parse_arm(std::string_view name) {
  for (auto arm : {AblationArm::Full, AblationArm::NoVerbalization, AblationArm::NoTypeConstraints,
                   AblationArm::NoMutualTopK, AblationArm::NoOneToOne, AblationArm::NoReasonerContext})
    if (arm_name(arm) == name) return arm;
  throw ConfigError("unknown ablation arm '" + std::string(name) +
                    "' (expected full, no_verbalization, no_type_constraints, no_mutual_topk, "
                    "no_one_to_one or no_reasoner_context)");
}

std::vector<AblationArm> parse_arms(const std::vector<std::string>& names) {
  std::vector<AblationArm> arms;
  for (const auto& n : names) arms.push_back(parse_arm(n));
  return arms;
}

PipelineConfig apply_arm(PipelineConfig config, AblationArm arm) {
  switch (arm) {
    case AblationArm::Full: break;
    case AblationArm::NoVerbalization: config.verbalizer.templates = TemplateSet::LabelOnly; break;
    case AblationArm::NoTypeConstraints: config.matcher.enforce_types = false; break;
    case AblationArm::NoMutualTopK: config.matcher.mutual_topk = false; break;
    case AblationArm::NoOneToOne: config.matcher.enforce_one_to_one = false; break;
    case AblationArm::NoReasonerContext: config.verbalizer.use_inferred_context = false; break;
  }
  return config;
}

std::vector<AblationRow> run_ablation(const PreparedSide& source, const PreparedSide& target,
                                      const PipelineConfig& base, const std::vector<AblationArm>& arms,
                                      const GoldAlignment& gold, bool parallel) {
  if (gold.pairs.empty()) throw EmptyGold();
  auto one = [&](AblationArm arm) {
    auto run = run_pipeline(source, target, apply_arm(base, arm));
    return AblationRow{std::string(arm_name(arm)), evaluate(run, gold)};
  };
  std::vector<AblationRow> rows;
  if (!parallel) {
    for (auto arm : arms) rows.push_back(one(arm));
    return rows;
  }
  std::vector<std::future<AblationRow>> futures;
  for (auto arm : arms) futures.push_back(std::async(std::launch::async, one, arm));
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

void write_metrics_jsonl(std::ostream& out, const std::vector<AblationRow>& rows) {
  for (const auto& row : rows) {
    const Metrics& m = row.metrics;
    nlohmann::ordered_json j;
    j["arm"] = row.arm;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    if (m.ranked) {
      j["precision_at_1"] = m.ranked->precision_at_1;
      j["mrr"] = m.ranked->mrr;
    }
    j["true_pos"] = m.true_pos;
    j["false_pos"] = m.false_pos;
    j["false_neg"] = m.false_neg;
    out << j.dump() << "\n";
  }
}

void write_metrics_table(std::ostream& out, const std::vector<AblationRow>& rows) {
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %9s %9s %9s %9s %9s %6s %6s %6s\n", "arm", "precision",
                "recall", "f1", "p@1", "mrr", "tp", "fp", "fn");
  out << line;
  for (const auto& row : rows) {
    const Metrics& m = row.metrics;
    double p1 = m.ranked ? m.ranked->precision_at_1 : 0.0;
    double mrr = m.ranked ? m.ranked->mrr : 0.0;
    std::snprintf(line, sizeof line, "%-20s %9.4f %9.4f %9.4f %9.4f %9.4f %6zu %6zu %6zu\n",
                  row.arm.c_str(), m.precision, m.recall, m.f1, p1, mrr,
                  m.true_pos, m.false_pos, m.false_neg);
    out << line;
  }
}

}  // namespace kgalign
