#pragma once

#include <chrono>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kgalign/embedding.hpp"
#include "kgalign/evaluation.hpp"
#include "kgalign/matcher.hpp"
#include "kgalign/reasoner.hpp"
#include "kgalign/verbalizer.hpp"

namespace kgalign {

struct PipelineConfig {
  ProviderConfig provider;
  MatcherConfig matcher;
  VerbalizerConfig verbalizer;
};

/// An ontology after closure, with the label languages to verbalize it in.
struct PreparedSide {
  InferredOntology inferred;
  std::vector<std::string> languages;
};

struct StageTiming {
  std::string stage;
  std::chrono::duration<double, std::milli> elapsed;
};

struct PipelineRun {
  std::vector<Verbalization> source_texts;
  std::vector<Verbalization> target_texts;
  EmbeddingMatrix source_embeddings;
  EmbeddingMatrix target_embeddings;
  AlignResult result;
  std::vector<StageTiming> timings;
};

/// verbalize -> embed -> align for one configuration.
PipelineRun run_pipeline(const PreparedSide& source, const PreparedSide& target,
                         const PipelineConfig& config);

/// Set metrics on the final alignment plus ranked metrics on the raw similarities.
Metrics evaluate(const PipelineRun& run, const GoldAlignment& gold);

enum class AblationArm {
  Full,
  NoVerbalization,
  NoTypeConstraints,
  NoMutualTopK,
  NoOneToOne,
  NoReasonerContext,
};

std::string_view arm_name(AblationArm arm);
/// Throws ConfigError naming the unknown arm.
AblationArm parse_arm(std::string_view name);
/// Parses every name before returning, so a bad name fails before any run.
std::vector<AblationArm> parse_arms(const std::vector<std::string>& names);

PipelineConfig apply_arm(PipelineConfig config, AblationArm arm);

struct AblationRow {
  std::string arm;
  Metrics metrics;
};

/// One pipeline execution per arm on identical inputs; rows in arm order.
std::vector<AblationRow> run_ablation(const PreparedSide& source, const PreparedSide& target,
                                      const PipelineConfig& base, const std::vector<AblationArm>& arms,
                                      const GoldAlignment& gold, bool parallel = false);

/// One JSON object per line.
void write_metrics_jsonl(std::ostream& out, const std::vector<AblationRow>& rows);
/// Fixed-width table for terminals.
void write_metrics_table(std::ostream& out, const std::vector<AblationRow>& rows);

}  // namespace kgalign
