// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: model training, constrained decoding, randomized
// self-verification, scaling benchmarks and CNF inspection.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logicbeam/decode.hpp"
#include "logicbeam/error.hpp"
#include "logicbeam/eval.hpp"
#include "logicbeam/external_scorer.hpp"
#include "logicbeam/formula.hpp"
#include "logicbeam/matcher.hpp"
#include "logicbeam/ngram.hpp"
#include "logicbeam/verify.hpp"

namespace lb = logicbeam;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerification = 3;

int exit_code_for(const lb::Error& e) {
  switch (e.kind()) {
    case lb::ErrorKind::kIo:
    case lb::ErrorKind::kCorruptFile:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lb::Error(lb::ErrorKind::kIo, "cannot open: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// train-lm

struct TrainArgs {
  std::string corpus_path;
  std::string out_path;
  int order = 3;
  double add_k = 0.1;
  std::vector<double> lambda;
};

int cmd_train_lm(const TrainArgs& args) {
  std::ifstream in(args.corpus_path);
  if (!in) throw lb::Error(lb::ErrorKind::kIo, "cannot open corpus: " + args.corpus_path);
  lb::Vocab vocab;
  auto corpus = lb::load_corpus(in, vocab);
  lb::NgramLm lm = lb::NgramLm::train(
      std::move(vocab), corpus,
      {.order = args.order, .add_k = args.add_k, .lambda = args.lambda});
  lm.save_file(args.out_path);
  std::ofstream vout(args.out_path + ".vocab");
  if (!vout) throw lb::Error(lb::ErrorKind::kIo, "cannot write vocab file");
  lm.vocab().save(vout);
  std::cout << "trained order-" << args.order << " model on " << corpus.size()
            << " sentences, |V| = " << lm.vocab().size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// decode / replay

struct TaskInstance {
  std::string id;
  std::string context;
  std::string formula;
};

std::vector<TaskInstance> read_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lb::Error(lb::ErrorKind::kIo, "cannot open instances: " + path);
  std::vector<TaskInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw lb::Error(lb::ErrorKind::kValidation,
                      path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    TaskInstance inst;
    inst.id = j.value("id", "line-" + std::to_string(lineno));
    inst.context = j.value("context", "");
    inst.formula = j.value("formula", "");
    out.push_back(std::move(inst));
  }
  return out;
}

struct DecodeJob {
  std::string model_path;
  std::string scorer_cmd;  // empty: score with the model itself
  std::string instances_path;
  std::string decoder = "neurologic";
  int beam_size = 4;
  std::optional<std::size_t> alpha;
  std::optional<int> beta;
  int max_len = 20;
  bool length_normalize = false;
  bool match_in_prompt = false;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<int> top_k;
  std::optional<double> top_p;
};

ordered_json job_to_manifest(const DecodeJob& job, const std::string& out_path) {
  ordered_json m;
  m["format"] = "logicbeam-manifest";
  m["version"] = 1;
  m["model"] = job.model_path;
  m["model_hash"] = hex64(fnv1a64_file(job.model_path));
  m["scorer_cmd"] = job.scorer_cmd.empty() ? json() : json(job.scorer_cmd);
  m["instances"] = job.instances_path;
  m["instances_hash"] = hex64(fnv1a64_file(job.instances_path));
  m["decoder"] = job.decoder;
  ordered_json cfg;
  cfg["k"] = job.beam_size;
  cfg["alpha"] = job.alpha ? json(*job.alpha) : json();
  cfg["beta"] = job.beta ? json(*job.beta) : json();
  cfg["max_len"] = job.max_len;
  cfg["length_normalize"] = job.length_normalize;
  cfg["match_in_prompt"] = job.match_in_prompt;
  cfg["seed"] = job.seed;
  cfg["jobs"] = job.jobs;
  cfg["top_k"] = job.top_k ? json(*job.top_k) : json();
  cfg["top_p"] = job.top_p ? json(*job.top_p) : json();
  m["config"] = cfg;
  m["out"] = out_path;
  return m;
}

DecodeJob job_from_manifest(const json& m) {
  if (m.value("format", "") != "logicbeam-manifest")
    throw lb::Error(lb::ErrorKind::kValidation, "not a run manifest");
  if (m.value("version", 0) != 1)
    throw lb::Error(lb::ErrorKind::kVersionMismatch, "unsupported manifest version");
  DecodeJob job;
  job.model_path = m.at("model").get<std::string>();
  if (!m.at("scorer_cmd").is_null()) job.scorer_cmd = m.at("scorer_cmd").get<std::string>();
  job.instances_path = m.at("instances").get<std::string>();
  job.decoder = m.at("decoder").get<std::string>();
  const json& cfg = m.at("config");
  job.beam_size = cfg.at("k").get<int>();
  if (!cfg.at("alpha").is_null()) job.alpha = cfg.at("alpha").get<std::size_t>();
  if (!cfg.at("beta").is_null()) job.beta = cfg.at("beta").get<int>();
  job.max_len = cfg.at("max_len").get<int>();
  job.length_normalize = cfg.at("length_normalize").get<bool>();
  job.match_in_prompt = cfg.at("match_in_prompt").get<bool>();
  job.seed = cfg.at("seed").get<std::uint64_t>();
  job.jobs = cfg.at("jobs").get<int>();
  if (!cfg.at("top_k").is_null()) job.top_k = cfg.at("top_k").get<int>();
  if (!cfg.at("top_p").is_null()) job.top_p = cfg.at("top_p").get<double>();
  // Reproducibility depends on identical inputs.
  if (hex64(fnv1a64_file(job.model_path)) != m.at("model_hash").get<std::string>())
    throw lb::Error(lb::ErrorKind::kValidation, "model file changed since the manifest was written");
  if (hex64(fnv1a64_file(job.instances_path)) != m.at("instances_hash").get<std::string>())
    throw lb::Error(lb::ErrorKind::kValidation, "instances file changed since the manifest was written");
  return job;
}

std::string decode_one(const lb::Scorer& scorer, const TaskInstance& inst,
                       const DecodeJob& job, std::size_t index) {
  ordered_json out;
  out["id"] = inst.id;
  out["decoder"] = job.decoder;
  try {
    const lb::Vocab& vocab = scorer.vocab();
    lb::Cnf cnf;
    bool blank = inst.formula.find_first_not_of(" \t\r\n") == std::string::npos;
    if (!blank) cnf = lb::to_cnf(lb::parse_formula(inst.formula, vocab));
    lb::CompiledConstraints cc = lb::CompiledConstraints::compile(cnf, vocab);
    std::vector<lb::TokenId> context = vocab.encode(inst.context);

    lb::DecoderConfig cfg;
    cfg.beam_size = job.beam_size;
    cfg.alpha = job.alpha;
    cfg.beta = job.beta;
    cfg.max_len = job.max_len;
    cfg.length_normalize = job.length_normalize;
    cfg.match_in_prompt = job.match_in_prompt;
    cfg.seed = job.seed + index;

    if (job.decoder == "oracle") {
      lb::OracleResult r = lb::brute_force_oracle(scorer, context, cnf, cfg.max_len);
      auto truth = lb::clause_values(cnf, r.tokens);
      out["text"] = vocab.decode(r.tokens);
      out["tokens"] = r.tokens;
      out["score"] = r.score;
      out["satisfied_count"] = r.max_satisfied_count;
      out["num_clauses"] = cnf.num_clauses();
      out["all_clauses_satisfied"] =
          r.max_satisfied_count == static_cast<std::int32_t>(cnf.num_clauses());
      out["clauses"] = truth;
      out["sequences_scored"] = r.sequences_scored;
      return out.dump();
    }

    lb::DecodeResult r;
    if (job.decoder == "neurologic") {
      r = lb::neurologic_decode(scorer, context, cc, cfg);
    } else if (job.decoder == "beam") {
      r = lb::beam_search(scorer, context, cfg, &cc);
    } else if (job.decoder == "greedy") {
      r = lb::greedy_decode(scorer, context, cfg, &cc);
    } else if (job.decoder == "topk") {
      r = lb::sample_decode(scorer, context, cfg,
                            {.top_k = job.top_k ? job.top_k : std::optional<int>(10),
                             .top_p = std::nullopt},
                            &cc);
    } else if (job.decoder == "topp") {
      r = lb::sample_decode(scorer, context, cfg,
                            {.top_k = std::nullopt,
                             .top_p = job.top_p ? job.top_p : std::optional<double>(0.9)},
                            &cc);
    } else if (job.decoder == "gbs") {
      r = lb::gbs_decode(scorer, context, cc, cfg);
    } else if (job.decoder == "cbs") {
      r = lb::cbs_decode(scorer, context, cc, cfg);
    } else {
      throw lb::Error(lb::ErrorKind::kValidation, "unknown decoder: " + job.decoder);
    }

    out["text"] = vocab.decode(r.tokens);
    out["tokens"] = r.tokens;
    out["score"] = r.score;
    out["satisfied_count"] = r.satisfied_count;
    out["num_clauses"] = cnf.num_clauses();
    out["all_clauses_satisfied"] = r.all_clauses_satisfied;
    out["clauses"] = r.clause_truth;
    out["stats"] = {{"calls", r.stats.scorer_calls},
                    {"rows", r.stats.scored_rows},
                    {"discarded", r.stats.discarded_unsatisfiable}};
  } catch (const lb::Error& e) {
    // In-band per-instance errors keep the batch alive.
    ordered_json err;
    err["id"] = inst.id;
    err["decoder"] = job.decoder;
    err["error"] = e.what();
    return err.dump();
  }
  return out.dump();
}

int run_decode_job(const DecodeJob& job, const std::string& out_path,
                   const std::string& manifest_out) {
  lb::NgramLm model = lb::NgramLm::load_file(job.model_path);
  std::unique_ptr<lb::ExternalScorer> external;
  if (!job.scorer_cmd.empty()) {
    external = std::make_unique<lb::ExternalScorer>(model.vocab(), job.scorer_cmd);
    // A broken scorer command is a configuration problem, not a per-instance
    // one; probe before starting the batch.
    std::vector<std::vector<lb::TokenId>> probe;
    external->score_next(probe);
  }
  const lb::Scorer& scorer = external ? static_cast<const lb::Scorer&>(*external)
                                      : static_cast<const lb::Scorer&>(model);

  auto instances = read_instances(job.instances_path);
  std::vector<std::string> lines(instances.size());

  const int jobs = std::max(1, job.jobs);
  if (jobs == 1 || instances.size() <= 1) {
    for (std::size_t i = 0; i < instances.size(); ++i)
      lines[i] = decode_one(scorer, instances[i], job, i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= instances.size()) return;
        lines[i] = decode_one(scorer, instances[i], job, i);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw lb::Error(lb::ErrorKind::kIo, "cannot write output: " + out_path);
  for (const std::string& line : lines) out << line << '\n';
  out.close();

  if (!manifest_out.empty()) {
    std::ofstream mout(manifest_out, std::ios::binary);
    if (!mout) throw lb::Error(lb::ErrorKind::kIo, "cannot write manifest: " + manifest_out);
    mout << job_to_manifest(job, out_path).dump(2) << '\n';
  }
  std::cerr << "decoded " << instances.size() << " instances -> " << out_path << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const lb::VerifyOptions& options, const std::string& json_out) {
  lb::VerifyReport report = lb::run_verification(options);
  ordered_json j;
  j["pass"] = report.pass;
  j["seed"] = options.seed;
  j["checks"] = ordered_json::array();
  for (const auto& check : report.checks) {
    j["checks"].push_back(
        {{"name", check.name}, {"pass", check.pass}, {"detail", check.detail}});
    std::cout << (check.pass ? "PASS" : "FAIL") << "  " << check.name << "  ("
              << check.detail << ")\n";
  }
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    if (!out) throw lb::Error(lb::ErrorKind::kIo, "cannot write report: " + json_out);
    out << j.dump(2) << '\n';
  }
  return report.pass ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  lb::BenchOptions options;
  std::string out_path;
  int content_words = 20;
  std::string model_path;
};

int cmd_bench(const BenchArgs& args) {
  std::unique_ptr<lb::Scorer> scorer;
  if (!args.model_path.empty()) {
    scorer = std::make_unique<lb::NgramLm>(lb::NgramLm::load_file(args.model_path));
  } else {
    lb::Vocab vocab;
    for (int i = 0; i < args.content_words; ++i) vocab.add_word("w" + std::to_string(i));
    scorer = std::make_unique<lb::UniformScorer>(std::move(vocab));
  }
  lb::BenchRun run = lb::bench_scaling(*scorer, args.options);
  for (const std::string& e : run.errors) std::cerr << "skipped: " << e << '\n';
  std::string csv = lb::bench_csv(run.records);
  if (args.out_path.empty() || args.out_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(args.out_path);
    if (!out) throw lb::Error(lb::ErrorKind::kIo, "cannot write CSV: " + args.out_path);
    out << csv;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cnf

int cmd_cnf(const std::string& formula_text) {
  bool blank = formula_text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (blank) {
    std::cout << '\n';
    return kExitOk;
  }
  lb::Vocab vocab;
  lb::Formula f = lb::parse_formula_open(formula_text, vocab);
  lb::Cnf cnf = lb::to_cnf(f);
  std::cout << lb::to_dsl(cnf, vocab) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"logicbeam: predicate-logic constrained decoding engine"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train-lm", "Train an n-gram language model");
  train_cmd->add_option("--corpus", train.corpus_path, "Training corpus (one sentence per line)")
      ->required();
  train_cmd->add_option("--out", train.out_path, "Model output path")->required();
  train_cmd->add_option("--n", train.order, "Model order");
  train_cmd->add_option("--add-k", train.add_k, "Additive smoothing constant");
  train_cmd->add_option("--lambda", train.lambda, "Interpolation weights (one per order)");

  DecodeJob job;
  std::string decode_out;
  std::string manifest_out;
  std::string alpha_text = "inf";
  int beta_value = 0;
  CLI::App* decode_cmd = app.add_subcommand("decode", "Decode a JSON-lines instance file");
  decode_cmd->add_option("--model", job.model_path, "Trained model file")->required();
  decode_cmd->add_option("--instances", job.instances_path, "JSON-lines instances")->required();
  decode_cmd
      ->add_option("--decoder", job.decoder,
                   "neurologic|beam|greedy|topk|topp|gbs|cbs|oracle")
      ->check(CLI::IsMember(
          {"neurologic", "beam", "greedy", "topk", "topp", "gbs", "cbs", "oracle"}));
  decode_cmd->add_option("--out", decode_out, "Results output path")->required();
  decode_cmd->add_option("--manifest", manifest_out, "Write a replayable run manifest");
  decode_cmd->add_option("--k", job.beam_size, "Beam size");
  decode_cmd->add_option("--alpha", alpha_text, "Score-rank cutoff (integer or 'inf')");
  decode_cmd->add_option("--beta", beta_value, "Satisfied-count bins kept (0 = all)");
  decode_cmd->add_option("--max-len", job.max_len, "Maximum generated tokens");
  decode_cmd->add_option("--seed", job.seed, "Base RNG seed");
  decode_cmd->add_option("--jobs", job.jobs, "Instance-level parallelism");
  decode_cmd->add_flag("--length-normalize", job.length_normalize,
                       "Divide scores by length at final selection");
  decode_cmd->add_flag("--match-in-prompt", job.match_in_prompt,
                       "Count phrases already present in the context");
  int topk_value = 0;
  double topp_value = 0.0;
  decode_cmd->add_option("--topk", topk_value, "Truncation size for --decoder topk");
  decode_cmd->add_option("--topp", topp_value, "Nucleus mass for --decoder topp");

  std::string replay_manifest;
  std::string replay_out;
  CLI::App* replay_cmd = app.add_subcommand("replay", "Re-run a decode from its manifest");
  replay_cmd->add_option("--manifest", replay_manifest, "Run manifest")->required();
  replay_cmd->add_option("--out", replay_out, "Results output path")->required();

  lb::VerifyOptions verify_options;
  std::string verify_json;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run randomized self-checks");
  verify_cmd->add_option("--trials", verify_options.matcher_trials, "Matcher equivalence trials");
  verify_cmd->add_option("--formula-trials", verify_options.formula_trials,
                         "Formula/CNF equivalence trials");
  verify_cmd->add_option("--seqs-per-formula", verify_options.sequences_per_formula,
                         "Sequences evaluated per formula");
  verify_cmd->add_option("--oracle-trials", verify_options.oracle_trials,
                         "Decode-vs-oracle trials");
  verify_cmd->add_option("--seed", verify_options.seed, "RNG seed");
  verify_cmd->add_option("--json", verify_json, "Write a machine-readable report");
  verify_cmd->add_flag("--corrupt-matcher", verify_options.corrupt_matcher)->group("");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Constraint-count scaling sweep");
  bench_cmd->add_option("--decoders", bench.options.decoders, "Decoders to sweep");
  bench_cmd->add_option("--c-min", bench.options.c_min, "Smallest constraint count");
  bench_cmd->add_option("--c-max", bench.options.c_max, "Largest constraint count");
  bench_cmd->add_option("--k", bench.options.beam_size, "Beam size");
  bench_cmd->add_option("--max-len", bench.options.max_len, "Maximum generated tokens");
  bench_cmd->add_option("--vocab-size", bench.content_words,
                        "Synthetic vocabulary size (uniform scorer)");
  bench_cmd->add_option("--model", bench.model_path, "Score with a trained model instead");
  bench_cmd->add_option("--out", bench.out_path, "CSV output path ('-' = stdout)");

  std::string cnf_text;
  CLI::App* cnf_cmd = app.add_subcommand("cnf", "Print a formula in conjunctive normal form");
  cnf_cmd->add_option("formula", cnf_text, "Constraint DSL formula")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*train_cmd) return cmd_train_lm(train);
    if (*decode_cmd) {
      if (alpha_text != "inf" && !alpha_text.empty()) {
        try {
          job.alpha = static_cast<std::size_t>(std::stoull(alpha_text));
        } catch (const std::exception&) {
          throw lb::Error(lb::ErrorKind::kValidation,
                          "--alpha expects a positive integer or 'inf'");
        }
      }
      if (beta_value > 0) job.beta = beta_value;
      if (topk_value > 0) job.top_k = topk_value;
      if (topp_value > 0.0) job.top_p = topp_value;
      if (const char* cmd = std::getenv("LOGICBEAM_SCORER_CMD"); cmd != nullptr && *cmd)
        job.scorer_cmd = cmd;
      return run_decode_job(job, decode_out, manifest_out);
    }
    if (*replay_cmd) {
      std::ifstream in(replay_manifest);
      if (!in) throw lb::Error(lb::ErrorKind::kIo, "cannot open manifest: " + replay_manifest);
      json m = json::parse(in, nullptr, /*allow_exceptions=*/true);
      return run_decode_job(job_from_manifest(m), replay_out, "");
    }
    if (*verify_cmd) return cmd_verify(verify_options, verify_json);
    if (*bench_cmd) return cmd_bench(bench);
    if (*cnf_cmd) return cmd_cnf(cnf_text);
  } catch (const lb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
