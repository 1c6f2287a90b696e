#include "kgalign/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kgalign/errors.hpp"
#include "kgalign/evaluation.hpp"
#include "kgalign/pipeline.hpp"
#include "kgalign/rdf_parser.hpp"

namespace kgalign::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string source;
  std::string target;
  std::string format = "auto";
  std::vector<std::string> src_lang{"en"};
  std::vector<std::string> tgt_lang{"en"};
  std::string provider = "hash";
  std::size_t dim = 384;
  std::string vectors_file;
  std::string endpoint;
  std::size_t batch_size = 64;
  std::size_t timeout_ms = 30000;
  std::size_t max_in_flight = 4;
  std::size_t k = 5;
  double theta = 0.5;
  bool no_verbalization = false;
  bool no_type_filter = false;
  bool no_mutual_topk = false;
  bool no_one_to_one = false;
  bool no_reasoner_context = false;
  bool ann = false;
  std::size_t pq_subspaces = 8;
  std::size_t pq_centroids = 256;
  std::size_t ann_min_cells = 4'000'000;
  std::string out = "alignment.rdf";
  std::string gold;
  std::string metrics_out;
  std::vector<std::string> ablation;
  bool parallel_ablation = false;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool dry_run = false;
};

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err) {}

  void stage(const std::string& name, const std::string& detail, Clock::time_point since) {
    std::chrono::duration<double, std::milli> ms = Clock::now() - since;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f ms", ms.count());
    err_ << "kgalign: " << name << ": " << detail << " (" << buf << ")\n";
  }
  void note(const std::string& text) { err_ << "kgalign: " << text << "\n"; }

 private:
  std::ostream& err_;
};

RdfFormat resolve_format(const std::string& flag, const std::string& path) {
  if (flag == "ntriples") return RdfFormat::NTriples;
  if (flag == "turtle") return RdfFormat::Turtle;
  return format_from_path(path);
}

ProviderConfig provider_config(const Options& o) {
  ProviderConfig p;
  if (o.provider == "hash") {
    p.kind = ProviderKind::HashTest;
  } else if (o.provider == "file") {
    p.kind = ProviderKind::FileVectors;
  } else {
    p.kind = ProviderKind::RemoteService;
  }
  p.dimension = o.dim;
  p.seed = o.seed;
  p.path = o.vectors_file;
  p.endpoint = o.endpoint;
  p.batch_size = o.batch_size;
  p.timeout = std::chrono::milliseconds(o.timeout_ms);
  p.max_in_flight = o.max_in_flight;
  return p;
}

PipelineConfig pipeline_config(const Options& o) {
  PipelineConfig c;
  c.provider = provider_config(o);
  c.matcher.k = o.k;
  c.matcher.theta = o.theta;
  c.matcher.mutual_topk = !o.no_mutual_topk;
  c.matcher.enforce_types = !o.no_type_filter;
  c.matcher.enforce_one_to_one = !o.no_one_to_one;
  c.matcher.workers = o.workers;
  if (o.ann) c.matcher.ann = AnnSettings{o.pq_subspaces, o.pq_centroids, o.seed, o.ann_min_cells};
  if (o.no_verbalization) c.verbalizer.templates = TemplateSet::LabelOnly;
  if (o.no_reasoner_context) c.verbalizer.use_inferred_context = false;
  return c;
}

void require_file(const std::string& path, const std::string& what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw ConfigError(what + " '" + path + "' does not exist");
}

// Writes through a sibling temporary so a failed run never leaves a partial file.
void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << content;
    if (!f.flush()) throw ConfigError("cannot write '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot write '" + path + "'");
  }
}

PreparedSide prepare(const std::string& path, RdfFormat format, std::vector<std::string> langs,
                     const char* side, Logger& log) {
  auto t0 = Clock::now();
  Ontology onto;
  try {
    onto = parse_ontology_file(path, format);
  } catch (const MalformedSyntax& e) {
    throw MalformedSyntax(e.line(), e.column(), path + ": " + e.detail());
  }
  std::ostringstream detail;
  detail << onto.entities.size() << " entities, " << onto.stats.triples << " triples, "
         << onto.stats.ignored_triples << " ignored";
  log.stage(std::string("parse ") + side, detail.str(), t0);

  t0 = Clock::now();
  PreparedSide prepared{compute_closure(onto), std::move(langs)};
  for (const auto& w : prepared.inferred.warnings) log.note(std::string(side) + ": " + w);
  log.stage(std::string("closure ") + side,
            std::to_string(prepared.inferred.collapsed_cycles) + " cycles collapsed", t0);
  return prepared;
}

int exit_code_for(const Error& e) {
  const std::string& s = e.stage();
  if (s == "config") return kConfigError;
  if (s == "parse" || s == "gold") return kParseError;
  if (s == "embed") return kProviderError;
  return kOtherError;
}

int execute(const Options& o, std::ostream& out, Logger& log) {
  require_file(o.source, "source file");
  require_file(o.target, "target file");
  if (!o.gold.empty()) require_file(o.gold, "gold file");
  if (o.provider == "file") require_file(o.vectors_file, "vectors file");
  if (o.provider == "remote" && o.endpoint.empty())
    throw ConfigError(std::string("remote provider needs --endpoint or ") + kEndpointEnv);
  const auto arms = parse_arms(o.ablation);
  if (!arms.empty() && o.gold.empty()) throw ConfigError("--ablation needs --gold");
  const PipelineConfig config = pipeline_config(o);
  config.provider.validate();
  config.matcher.validate();

  PreparedSide source =
      prepare(o.source, resolve_format(o.format, o.source), o.src_lang, "source", log);
  PreparedSide target =
      prepare(o.target, resolve_format(o.format, o.target), o.tgt_lang, "target", log);

  std::optional<GoldAlignment> gold;
  if (!o.gold.empty()) {
    gold = load_gold_file(o.gold);
    for (const auto& w : gold->warnings) log.note("gold: " + w);
    log.note("gold: " + std::to_string(gold->pairs.size()) + " pairs");
  }

  if (o.dry_run) {
    verbalize_all(source.inferred, source.languages, config.verbalizer);
    verbalize_all(target.inferred, target.languages, config.verbalizer);
    log.note("dry run: configuration and inputs are valid");
    return kOk;
  }

  PipelineRun run = run_pipeline(source, target, config);
  for (const auto& t : run.timings) {
    std::ostringstream d;
    if (t.stage == "verbalize")
      d << run.source_texts.size() << " + " << run.target_texts.size() << " texts";
    else if (t.stage == "embed")
      d << run.source_embeddings.rows() << " x " << run.target_embeddings.rows()
        << " vectors, dim " << run.source_embeddings.dim;
    else
      d << run.result.counts.candidates << " candidates, " << run.result.counts.assigned
        << " assigned, " << run.result.counts.above_threshold << " above threshold, "
        << run.result.counts.type_consistent << " kept" << (run.result.counts.used_ann ? " (ann)" : "");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f ms", t.elapsed.count());
    log.note(t.stage + ": " + d.str() + " (" + buf + ")");
  }

  std::ostringstream xml;
  write_alignment_xml(xml, run.result.alignment, source.inferred.base.ontology_iri,
                      target.inferred.base.ontology_iri);

  std::vector<AblationRow> rows;
  if (gold) {
    if (arms.empty()) {
      rows.push_back({"run", evaluate(run, *gold)});
    } else {
      auto t0 = Clock::now();
      rows = run_ablation(source, target, config, arms, *gold, o.parallel_ablation);
      log.stage("ablation", std::to_string(rows.size()) + " arms", t0);
    }
  }

  write_atomically(o.out, xml.str());
  log.note("wrote " + std::to_string(run.result.alignment.cells.size()) + " correspondences to " +
           o.out);
  if (!rows.empty()) {
    std::ostringstream jsonl;
    write_metrics_jsonl(jsonl, rows);
    const std::string metrics_path = o.metrics_out.empty() ? o.out + ".metrics.jsonl" : o.metrics_out;
    write_atomically(metrics_path, jsonl.str());
    write_metrics_table(out, rows);
    log.note("wrote metrics to " + metrics_path);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Align two ontologies through verbalized, embedded entities.", "kgalign"};
  app.set_config("--config", "", "key=value file; flags given on the command line take precedence");
  app.add_option("--source", o.source, "Source ontology (N-Triples or Turtle)")->required();
  app.add_option("--target", o.target, "Target ontology (N-Triples or Turtle)")->required();
  app.add_option("--format", o.format, "Input syntax; auto picks N-Triples for .nt files")
      ->check(CLI::IsMember({"auto", "ntriples", "turtle"}))
      ->capture_default_str();
  app.add_option("--src-lang", o.src_lang, "Label language preference for the source, in order")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--tgt-lang", o.tgt_lang, "Label language preference for the target, in order")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--provider", o.provider, "Embedding provider")
      ->check(CLI::IsMember({"hash", "file", "remote"}))
      ->capture_default_str();
  app.add_option("--dim", o.dim, "Dimension of the hash provider")->capture_default_str();
  app.add_option("--vectors-file", o.vectors_file, "Precomputed vectors for the file provider");
  app.add_option("--endpoint", o.endpoint,
                 std::string("Embedding service base URL; ") + kEndpointEnv +
                     " overrides a config-file value");
  app.add_option("--batch-size", o.batch_size, "Texts per remote request")->capture_default_str();
  app.add_option("--timeout-ms", o.timeout_ms, "Remote request timeout")->capture_default_str();
  app.add_option("--max-in-flight", o.max_in_flight, "Concurrent remote requests")
      ->capture_default_str();
  app.add_option("--k", o.k, "Mutual top-k depth")->capture_default_str();
  app.add_option("--theta", o.theta, "Minimum cosine for an emitted correspondence")
      ->capture_default_str();
  app.add_flag("--no-verbalization", o.no_verbalization, "Embed bare labels");
  app.add_flag("--no-type-filter", o.no_type_filter, "Allow cross-kind correspondences");
  app.add_flag("--no-mutual-topk", o.no_mutual_topk, "Use every cell as a candidate");
  app.add_flag("--no-one-to-one", o.no_one_to_one, "Skip the assignment step");
  app.add_flag("--no-reasoner-context", o.no_reasoner_context,
               "Verbalize with asserted edges only");
  app.add_flag("--ann", o.ann, "Use product-quantized candidate search on large inputs");
  app.add_option("--pq-subspaces", o.pq_subspaces, "PQ subspaces")->capture_default_str();
  app.add_option("--pq-centroids", o.pq_centroids, "PQ centroids per subspace")
      ->capture_default_str();
  app.add_option("--ann-min-cells", o.ann_min_cells,
                 "Source x target size from which --ann takes effect")
      ->capture_default_str();
  app.add_option("--out", o.out, "Alignment XML output")->capture_default_str();
  app.add_option("--gold", o.gold, "Reference alignment (XML, or TSV for .tsv/.txt)");
  app.add_option("--metrics-out", o.metrics_out, "Metrics JSONL output (default: <out>.metrics.jsonl)");
  app.add_option("--ablation", o.ablation,
                 "Comma-separated arms: full, no_verbalization, no_type_constraints, "
                 "no_mutual_topk, no_one_to_one, no_reasoner_context")
      ->delimiter(',');
  app.add_flag("--parallel-ablation", o.parallel_ablation, "Run ablation arms concurrently");
  app.add_option("--seed", o.seed, "Seed for the hash provider and PQ training")
      ->capture_default_str();
  app.add_option("--workers", o.workers, "Threads for the similarity matrix")->capture_default_str();
  app.add_flag("--dry-run", o.dry_run, "Validate configuration and inputs, then stop");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream sink_out, sink_err;
    int code = app.exit(e, sink_out, sink_err);
    out << sink_out.str();
    err << sink_err.str();
    return code == 0 ? kOk : kConfigError;
  }

  // Command line beats the environment, which beats the config file.
  bool endpoint_on_command_line = false;
  for (const auto& a : args)
    if (a == "--endpoint" || a.starts_with("--endpoint=")) endpoint_on_command_line = true;
  if (!endpoint_on_command_line)
    if (const char* env = std::getenv(kEndpointEnv); env && *env) o.endpoint = env;

  Logger log(err);
  try {
    return execute(o, out, log);
  } catch (const Error& e) {
    err << "kgalign: " << e.stage() << " error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "kgalign: error: " << e.what() << "\n";
    return kOtherError;
  }
}

}  // namespace kgalign::cli
