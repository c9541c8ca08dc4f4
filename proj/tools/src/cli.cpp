#include "cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "flowscope/concentration.hpp"
#include "flowscope/dependency.hpp"
#include "flowscope/error.hpp"
#include "flowscope/exclusivity.hpp"
#include "flowscope/features.hpp"
#include "flowscope/flows.hpp"
#include "flowscope/forest.hpp"
#include "flowscope/ingest.hpp"
#include "flowscope/parallel.hpp"
#include "flowscope/pipeline.hpp"
#include "flowscope/revenue.hpp"
#include "flowscope/synth.hpp"
#include "flowscope/tailfit.hpp"

#ifndef FLOWSCOPE_VERSION
#define FLOWSCOPE_VERSION "0.0.0"
#endif

namespace flowscope::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cli", Errc::MissingFile, "cannot write " + path);
  f << content;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cli", Errc::MissingFile, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// First column of a CSV, header "contract" optional.
std::set<Address> load_address_list(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::set<Address> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cell = line.substr(0, line.find(','));
    if (cell.empty() || (lineno == 1 && cell == "contract")) continue;
    Address a;
    if (!Address::try_from_hex(cell, a)) throw SchemaError(path.filename().string(), lineno, "contract", "expected 40 hex digits");
    out.insert(a);
  }
  return out;
}

struct Context {
  std::string data = ".";
  unsigned threads = 0;
  bool quiet = false;
  std::ostream* out = nullptr;

  Dataset dataset() const { return load_directory(data); }

  LabelSet labels(const std::string& path) const {
    if (!path.empty()) return LabelSet::load(path);
    const auto fallback = fs::path(data) / "labels.csv";
    return fs::exists(fallback) ? LabelSet::load(fallback) : LabelSet{};
  }

  template <typename... Args>
  void say(fmt::format_string<Args...> f, Args&&... args) const {
    if (!quiet) fmt::print(*out, "{}\n", fmt::format(f, std::forward<Args>(args)...));
  }
};

const std::string& builder_name(const Dataset& ds, BuilderId b) { return ds.registry().id(b); }

// ---- subcommands -----------------------------------------------------------

struct SynthOpts {
  std::string config;
  std::string out;
};

void cmd_synth(const Context& ctx, const SynthOpts& o) {
  const auto m = generate(load_scenario(o.config), o.out);
  ctx.say("{}: {} blocks, {} txs ({} swap), {} flows", o.out, m.blocks, m.txs, m.swap_txs, m.flows.size());
}

struct RevenueOpts {
  std::optional<std::uint64_t> block;
  std::string out;
};

void cmd_revenue(const Context& ctx, const RevenueOpts& o) {
  if (!o.block && o.out.empty()) throw Usage("revenue: pass --block N or --out FILE");
  const auto ds = ctx.dataset();
  if (o.block) {
    const auto e = block_economics(ds, *o.block);
    ojson j = {{"block", e.block_number},       {"builder", builder_name(ds, e.builder)},
               {"revenue_wei", e.revenue.str()}, {"revenue_eth", e.revenue.eth()},
               {"bid_wei", e.bid.str()},         {"profit_wei", e.profit.str()},
               {"profit_eth", e.profit.eth()}};
    *ctx.out << j.dump() << "\n";
  }
  if (!o.out.empty()) {
    std::string csv = "block,builder,revenue_wei,bid_wei,profit_wei\n";
    for (std::size_t b = 0; b < ds.blocks().size(); ++b) {
      const auto e = block_economics_at(ds, b);
      csv += fmt::format("{},{},{},{},{}\n", e.block_number, builder_name(ds, e.builder), e.revenue.str(), e.bid.str(),
                         e.profit.str());
    }
    write_output(o.out, csv, *ctx.out);
    ctx.say("trading revenue: {} wei", trading_revenue_total(ds).str());
  }
}

Granularity parse_granularity(const std::string& g) {
  if (g == "weekly") return Granularity::weekly;
  if (g == "daily") return Granularity::daily;
  throw Usage("--granularity must be weekly or daily");
}

struct FlowsOpts {
  std::string granularity = "weekly";
  std::string out;
};

void cmd_flows(const Context& ctx, const FlowsOpts& o) {
  const auto ds = ctx.dataset();
  const auto table = build_flows(ds, parse_granularity(o.granularity));
  ojson j;
  j["granularity"] = o.granularity;
  j["anchor"] = table.scheme().anchor();
  auto& flows = j["flows"] = ojson::array();
  for (const auto& f : table.flows()) {
    ojson cells = ojson::array();
    for (const auto& c : f.cells) {
      cells.push_back({{"epoch", c.epoch}, {"builder", builder_name(ds, c.builder)}, {"amount_wei", c.amount.str()}});
    }
    ojson pools = ojson::array();
    for (const auto& [pool, usd] : f.pool_volume_usd) pools.push_back({{"pool", pool.hex()}, {"volume_usd", usd}});
    flows.push_back({{"contract", f.contract.hex()},
                     {"total_bribe_wei", f.total_bribe.str()},
                     {"tx_count", f.tx_count},
                     {"cells", std::move(cells)},
                     {"pools", std::move(pools)}});
  }
  write_output(o.out, dump(j), *ctx.out);
  ctx.say("{} flows", table.size());
}

struct ExclusivityOpts {
  std::string ground_truth;
  std::string out;
  std::optional<double> tau;
  std::string eof_out;
  std::string threshold_out;
};

void cmd_exclusivity(const Context& ctx, const ExclusivityOpts& o) {
  const auto ds = ctx.dataset();
  const auto labels = ctx.labels(o.ground_truth);
  const auto scheme = EpochScheme::for_dataset(ds, Granularity::weekly);
  const auto flows = build_flows(ds, scheme);
  auto scores = score_flows(flows, MarketTable::build(ds, scheme));

  std::optional<ThresholdResult> fit;
  double tau = std::numeric_limits<double>::infinity();
  if (o.tau) {
    tau = *o.tau;
  } else {
    try {
      fit = optimize_threshold(scores, labels);
      tau = fit->tau;
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateGroundTruth || !o.eof_out.empty()) throw;
      ctx.say("no usable ground truth; scores written without a threshold");
    }
  }

  std::sort(scores.begin(), scores.end(), [](const ExclusivityScore& a, const ExclusivityScore& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.contract < b.contract;
  });
  std::string csv = "contract,label,total_score,total_bribe_eth,avg_kl,active_weeks,eof\n";
  for (const auto& s : scores) {
    csv += fmt::format("{},{},{},{},{},{},{}\n", s.contract.hex(), to_string(labels.manual_mechanism(s.contract)), s.total,
                       s.total_bribe.eth(), s.average_kl(), s.active_epochs(), s.total > tau ? "true" : "false");
  }
  write_output(o.out, csv, *ctx.out);

  const auto eofs = classify_eof(scores, tau);
  if (!o.eof_out.empty()) {
    std::string list = "contract\n";
    for (const auto& a : eofs) list += a.hex() + "\n";
    write_output(o.eof_out, list, *ctx.out);
  }
  if (!o.threshold_out.empty()) {
    ojson j;
    j["tau"] = std::isfinite(tau) ? ojson(tau) : ojson(nullptr);
    j["eof_count"] = eofs.size();
    if (fit) {
      j["f1"] = fit->f1;
      j["precision"] = fit->precision;
      j["recall"] = fit->recall;
      j["positives"] = fit->positives;
      j["negatives"] = fit->negatives;
      auto& curve = j["curve"] = ojson::array();
      for (const auto& p : fit->curve) {
        curve.push_back({{"tau", p.tau}, {"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}});
      }
    }
    write_output(o.threshold_out, dump(j), *ctx.out);
  }
  if (fit) ctx.say("tau={} f1={} eofs={}", fit->tau, fit->f1, eofs.size());
}

struct EdrOpts {
  std::string eof;
  std::string out;
};

void cmd_edr(const Context& ctx, const EdrOpts& o) {
  const auto ds = ctx.dataset();
  const auto eofs = load_address_list(o.eof);
  const auto records = edr_for_all_blocks(ds, eofs);
  std::string csv = "builder,blocks";
  for (std::size_t k = 0; k < kEdrBinCount; ++k) csv += fmt::format(",\"{}\"", to_string(static_cast<EdrBin>(k)));
  csv += "\n";
  auto row = [&](const std::string& name, std::size_t blocks, const EdrHistogram& h) {
    csv += fmt::format("{},{}", name, blocks);
    for (double v : h) csv += fmt::format(",{}", v);
    csv += "\n";
  };
  for (BuilderId b = 1; b < ds.registry().size(); ++b) {
    const auto n = static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [&](const EdrRecord& r) { return r.builder == b; }));
    if (n == 0) continue;
    row(builder_name(ds, b), n, edr_histogram(records, b));
  }
  if (!records.empty()) row("all", records.size(), edr_histogram_pooled(records));
  write_output(o.out, csv, *ctx.out);
  ctx.say("{} blocks, {} EOF contracts", records.size(), eofs.size());
}

struct FeaturesOpts {
  std::string out;
  std::size_t min_txs = kDefaultMinTxCount;
};

std::string features_csv(const std::vector<FeatureVector>& rows) {
  std::string csv = "contract";
  for (auto n : kFeatureNames) csv += fmt::format(",{}", n);
  csv += ",low_confidence\n";
  for (const auto& v : rows) {
    csv += v.contract.hex();
    for (double x : v.values) csv += fmt::format(",{}", x);
    csv += v.low_confidence ? ",true\n" : ",false\n";
  }
  return csv;
}

void cmd_features(const Context& ctx, const FeaturesOpts& o) {
  const auto rows = extract_all_features(ctx.dataset(), o.min_txs);
  write_output(o.out, features_csv(rows), *ctx.out);
  ctx.say("{} contracts", rows.size());
}

struct TrainOpts {
  std::string labels;
  std::uint64_t seed = 42;
  std::string out;
  std::string report;
};

ojson training_json(const TrainingReport& r) {
  ojson j;
  j["seed"] = r.forest.seed;
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  j["validation_accuracy"] = r.forest.validation_accuracy;
  j["validation_mean"] = r.validation_mean;
  j["validation_stddev"] = r.validation_stddev;
  j["test_accuracy"] = r.test_accuracy;
  j["test_vote_histogram"] = r.test_vote_histogram;
  ojson imp = ojson::object();
  const auto importance = feature_importance(r.forest);
  for (std::size_t k = 0; k < kFeatureCount; ++k) imp[std::string(kFeatureNames[k])] = importance[k];
  j["feature_importance"] = std::move(imp);
  return j;
}

TrainingReport train_from_labels(const Dataset& ds, const LabelSet& labels, std::uint64_t seed) {
  const auto examples = labeled_examples(ds, labels);
  return train_forest(examples, seed);
}

void cmd_train(const Context& ctx, const TrainOpts& o) {
  const auto ds = ctx.dataset();
  const auto report = train_from_labels(ds, ctx.labels(o.labels), o.seed);
  write_output(o.out, forest_to_json(report.forest), *ctx.out);
  if (!o.report.empty()) write_output(o.report, dump(training_json(report)), *ctx.out);
  ctx.say("validation {:.4f} +/- {:.4f}, test accuracy {:.4f} on {} contracts", report.validation_mean,
          report.validation_stddev, report.test_accuracy, report.test_size);
}

struct ClassifyOpts {
  std::string forest;
  std::string out = "-";
};

void cmd_classify(const Context& ctx, const ClassifyOpts& o) {
  const auto forest = forest_from_json(read_text(o.forest));
  const auto rows = extract_all_features(ctx.dataset());
  std::string csv = "contract,class,votes,low_confidence\n";
  for (const auto& v : rows) {
    const auto p = predict(forest, v);
    csv += fmt::format("{},{},{},{}\n", v.contract.hex(), to_string(p.label), p.votes, v.low_confidence);
  }
  write_output(o.out, csv, *ctx.out);
}

struct PipelineOpts {
  std::size_t k = kDefaultTopK;
  std::string forest;
  std::string labels;
  std::uint64_t seed = 42;
  std::string out;
};

void cmd_pipeline(const Context& ctx, const PipelineOpts& o) {
  const auto ds = ctx.dataset();
  const auto labels = ctx.labels(o.labels);
  const Forest forest =
      o.forest.empty() ? train_from_labels(ds, labels, o.seed).forest : forest_from_json(read_text(o.forest));
  const auto flows = build_flows(ds, Granularity::weekly);
  const auto rows = classify_top_flows(flows, ds, forest, labels, o.k);
  if (o.out == "-") {
    const auto tmp = fs::temp_directory_path() / "flowscope-mechanisms.csv";
    write_mechanisms(tmp, rows);
    *ctx.out << read_text(tmp);
    fs::remove(tmp);
  } else {
    if (fs::path(o.out).has_parent_path()) fs::create_directories(fs::path(o.out).parent_path());
    write_mechanisms(o.out, rows);
  }
  std::array<std::size_t, kCategoryCount> counts{};
  for (const auto& r : rows) ++counts[static_cast<std::size_t>(r.category)];
  ctx.say("{} flows: protocol={} atomic={} non_atomic={} miscellaneous={}", rows.size(), counts[0], counts[1], counts[2],
          counts[3]);
}

std::map<Address, Category> mechanisms_for(const Context& ctx, const std::string& path, const std::string& labels_path) {
  if (!path.empty()) return load_mechanisms(path);
  std::map<Address, Category> out;
  const auto labels = ctx.labels(labels_path);
  for (const auto& [a, l] : labels.entries()) {
    if (auto c = category_of(l.mechanism)) out.emplace(a, *c);
  }
  return out;
}

struct MarketOpts {
  std::string phases;
  std::string out;
  std::string mechanisms;
  std::string labels;
  std::string eof;
  std::string csv_dir;
};

void cmd_market(const Context& ctx, const MarketOpts& o) {
  const auto ds = ctx.dataset();
  const auto scheme = EpochScheme::for_dataset(ds, Granularity::weekly);
  const auto markets = MarketTable::build(ds, scheme);
  const auto phases = o.phases.empty() ? default_phases() : load_phases(o.phases);
  const auto mechanisms = mechanisms_for(ctx, o.mechanisms, o.labels);

  ojson j;
  auto& hhi = j["hhi"] = ojson::array();
  const auto series = hhi_series(markets, scheme);
  for (const auto& p : series) {
    hhi.push_back({{"epoch", p.epoch}, {"start", format_date(p.start)}, {"blocks", p.blocks}, {"hhi", p.hhi}});
  }
  auto& builders = j["builders"] = ojson::array();
  for (const auto& b : categorize_builders(markets, ds.registry())) {
    builders.push_back({{"builder", builder_name(ds, b.builder)}, {"peak_share", b.peak_share},
                        {"category", std::string(to_string(b.category))}});
  }
  auto& comp = j["phases"] = ojson::array();
  for (const auto& p : phases) {
    ojson e = {{"name", p.name}, {"start", format_date(p.start)}, {"end", format_date(p.end)}};
    try {
      const auto c = compose_phase(ds, mechanisms, p);
      ojson fr = ojson::object();
      ojson wei = ojson::object();
      for (std::size_t k = 0; k < kCategoryCount; ++k) {
        const std::string name(to_string(static_cast<Category>(k)));
        fr[name] = c.fraction[k];
        wei[name] = c.bribe[k].str();
      }
      e["total_wei"] = c.total.str();
      e["bribe_wei"] = std::move(wei);
      e["fraction"] = std::move(fr);
    } catch (const Error& err) {
      if (err.code() != Errc::EmptyPhase) throw;
      e["fraction"] = nullptr;
    }
    comp.push_back(std::move(e));
  }
  std::vector<CorrelationResult> correlations;
  if (!o.eof.empty()) {
    const auto eofs = load_address_list(o.eof);
    auto& corr = j["correlation"] = ojson::array();
    for (BuilderId b = 1; b < ds.registry().size(); ++b) {
      ojson e = {{"builder", builder_name(ds, b)}};
      try {
        auto r = eof_share_correlation(ds, eofs, b);
        e["r"] = r.r ? ojson(*r.r) : ojson(nullptr);
        e["days"] = r.days;
        e["active_days"] = r.active_days;
        e["dropped_days"] = r.dropped_days;
        correlations.push_back(std::move(r));
      } catch (const Error& err) {
        if (err.code() != Errc::InsufficientDays) throw;
        e["r"] = nullptr;
        e["error"] = err.qualified_code();
      }
      corr.push_back(std::move(e));
    }
  }
  write_output(o.out, dump(j), *ctx.out);

  if (!o.csv_dir.empty()) {
    const fs::path dir(o.csv_dir);
    fs::create_directories(dir);
    std::string shares = "epoch,start,builder,share\n";
    for (const auto& [epoch, m] : markets.epochs()) {
      for (const auto& [b, s] : m.shares()) {
        shares += fmt::format("{},{},{},{}\n", epoch, format_date(scheme.epoch(epoch).start), builder_name(ds, b), s);
      }
    }
    write_output((dir / "shares.csv").string(), shares, *ctx.out);
    std::string h = "epoch,start,hhi\n";
    for (const auto& p : series) h += fmt::format("{},{},{}\n", p.epoch, format_date(p.start), p.hhi);
    write_output((dir / "hhi.csv").string(), h, *ctx.out);
    if (!correlations.empty()) {
      std::string c = "builder,day,share,eof_ratio\n";
      for (const auto& r : correlations) {
        for (std::size_t d = 0; d < r.share.size(); ++d) {
          c += fmt::format("{},{},{},{}\n", builder_name(ds, r.builder), d, r.share[d], r.eof_ratio[d]);
        }
      }
      write_output((dir / "correlation.csv").string(), c, *ctx.out);
    }
  }
  ctx.say("{} weeks, {} phases", series.size(), phases.size());
}

struct TailOpts {
  std::string mechanism = "non_atomic";
  std::string mechanisms;
  std::string labels;
  std::string out;
  std::size_t min_tail = kMinTailSamples;
};

void cmd_tailfit(const Context& ctx, const TailOpts& o) {
  Category want;
  if (!parse_category(o.mechanism, want)) throw Usage("--mechanism must be protocol, atomic, non_atomic or miscellaneous");
  const auto ds = ctx.dataset();
  const auto mechanisms = mechanisms_for(ctx, o.mechanisms, o.labels);
  const auto flows = build_flows(ds, Granularity::weekly);
  std::vector<double> bribes;
  for (const auto& f : flows.flows()) {
    auto it = mechanisms.find(f.contract);
    if (it != mechanisms.end() && it->second == want && f.total_bribe.value() > 0) bribes.push_back(f.total_bribe.eth());
  }
  if (bribes.empty()) throw Error("tailfit", Errc::InsufficientTail, "no " + o.mechanism + " flow carries a bribe");
  const auto fit = fit_power_law(bribes, o.min_tail);
  ojson j = {{"mechanism", o.mechanism},
             {"flows", bribes.size()},
             {"alpha", fit.alpha},
             {"x_min_eth", fit.x_min},
             {"ks_statistic", fit.ks_statistic},
             {"tail_count", fit.tail_count},
             {"top2_share", concentration_summary(bribes, 2)},
             {"top10_share", concentration_summary(bribes, 10)}};
  write_output(o.out, dump(j), *ctx.out);
  ctx.say("alpha={} x_min={} D={}", fit.alpha, fit.x_min, fit.ks_statistic);
}

void emit_error(std::ostream& err, const std::string& code, const std::string& message, const ojson& extra = {}) {
  ojson j = {{"error", {{"code", code}, {"message", message}}}};
  if (extra.is_object()) {
    for (const auto& [k, v] : extra.items()) j["error"][k] = v;
  }
  err << j.dump() << "\n";
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"flowscope: builder revenue, order-flow exclusivity and market concentration analytics", "flowscope"};
  app.require_subcommand(0, 1);
  Context ctx;
  ctx.out = &out;
  bool version = false;
  app.add_flag("--version", version, "print the version and exit");
  app.add_option("--data", ctx.data, "dataset directory (blocks/txs/swaps.jsonl, builders.csv)");
  app.add_option("--threads", ctx.threads, "worker threads (0 = all cores)");
  app.add_flag("--quiet", ctx.quiet, "suppress summaries on stdout");

  std::function<void()> action;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  SynthOpts synth;
  auto* s_synth = sub("synth", "generate a synthetic dataset with a ground-truth manifest");
  s_synth->add_option("--config", synth.config, "scenario TOML")->required();
  s_synth->add_option("--out", synth.out, "output directory")->required();
  s_synth->callback([&] { action = [&] { cmd_synth(ctx, synth); }; });

  RevenueOpts revenue;
  auto* s_rev = sub("revenue", "per-block revenue and profit");
  s_rev->add_option("--block", revenue.block, "block number");
  s_rev->add_option("--out", revenue.out, "write every block to CSV");
  s_rev->callback([&] { action = [&] { cmd_revenue(ctx, revenue); }; });

  FlowsOpts flows;
  auto* s_flows = sub("flows", "order flows with per-epoch bribe matrices");
  s_flows->add_option("--granularity", flows.granularity, "weekly or daily");
  s_flows->add_option("--out", flows.out, "JSON output")->required();
  s_flows->callback([&] { action = [&] { cmd_flows(ctx, flows); }; });

  ExclusivityOpts excl;
  auto* s_excl = sub("exclusivity", "exclusivity scores and EOF threshold");
  s_excl->add_option("--ground-truth", excl.ground_truth, "labels CSV with known_eof (default <data>/labels.csv)");
  s_excl->add_option("--out", excl.out, "scores CSV")->required();
  s_excl->add_option("--tau", excl.tau, "fixed threshold instead of the F1 sweep");
  s_excl->add_option("--eof-out", excl.eof_out, "write the EOF contract list");
  s_excl->add_option("--threshold-out", excl.threshold_out, "write the threshold sweep as JSON");
  s_excl->callback([&] { action = [&] { cmd_exclusivity(ctx, excl); }; });

  EdrOpts edr;
  auto* s_edr = sub("edr", "EOF dependency ratio histograms");
  s_edr->add_option("--eof", edr.eof, "EOF contract list")->required();
  s_edr->add_option("--out", edr.out, "histogram CSV")->required();
  s_edr->callback([&] { action = [&] { cmd_edr(ctx, edr); }; });

  FeaturesOpts feats;
  auto* s_feat = sub("features", "nine-feature contract descriptors");
  s_feat->add_option("--out", feats.out, "CSV output")->required();
  s_feat->add_option("--min-txs", feats.min_txs, "low-confidence cutoff");
  s_feat->callback([&] { action = [&] { cmd_features(ctx, feats); }; });

  TrainOpts train;
  auto* s_train = sub("train", "train the seven-tree forest on manual labels");
  s_train->add_option("--labels", train.labels, "labels CSV (default <data>/labels.csv)");
  s_train->add_option("--seed", train.seed, "RNG seed");
  s_train->add_option("--out", train.out, "forest JSON")->required();
  s_train->add_option("--report", train.report, "training report JSON");
  s_train->callback([&] { action = [&] { cmd_train(ctx, train); }; });

  ClassifyOpts cls;
  auto* s_cls = sub("classify", "apply a trained forest to every swap contract");
  s_cls->add_option("--forest", cls.forest, "forest JSON")->required();
  s_cls->add_option("--out", cls.out, "predictions CSV (default stdout)");
  s_cls->callback([&] { action = [&] { cmd_classify(ctx, cls); }; });

  PipelineOpts pipe;
  auto* s_pipe = sub("pipeline", "assign a mechanism to each of the top-K flows");
  s_pipe->add_option("--k", pipe.k, "number of flows");
  s_pipe->add_option("--forest", pipe.forest, "forest JSON (trained on the labels when omitted)");
  s_pipe->add_option("--labels", pipe.labels, "labels CSV (default <data>/labels.csv)");
  s_pipe->add_option("--seed", pipe.seed, "seed when training inline");
  s_pipe->add_option("--out", pipe.out, "mechanisms CSV")->required();
  s_pipe->callback([&] { action = [&] { cmd_pipeline(ctx, pipe); }; });

  MarketOpts market;
  auto* s_market = sub("market-report", "HHI, builder categories, phase composition, correlations");
  s_market->add_option("--phases", market.phases, "phase TOML (default boundaries when omitted)");
  s_market->add_option("--out", market.out, "report JSON")->required();
  s_market->add_option("--mechanisms", market.mechanisms, "mechanisms CSV from `pipeline`");
  s_market->add_option("--labels", market.labels, "labels CSV used when --mechanisms is absent");
  s_market->add_option("--eof", market.eof, "EOF contract list for the correlation table");
  s_market->add_option("--csv-dir", market.csv_dir, "also write shares.csv, hhi.csv, correlation.csv");
  s_market->callback([&] { action = [&] { cmd_market(ctx, market); }; });

  TailOpts tail;
  auto* s_tail = sub("tailfit", "power-law fit of per-flow bribes");
  s_tail->add_option("--mechanism", tail.mechanism, "category to fit");
  s_tail->add_option("--mechanisms", tail.mechanisms, "mechanisms CSV from `pipeline`");
  s_tail->add_option("--labels", tail.labels, "labels CSV used when --mechanisms is absent");
  s_tail->add_option("--min-tail", tail.min_tail, "minimum samples above x_min");
  s_tail->add_option("--out", tail.out, "JSON output")->required();
  s_tail->callback([&] { action = [&] { cmd_tailfit(ctx, tail); }; });

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "cli.UsageError", e.what());
    return kExitUsage;
  }
  if (version) {
    out << "flowscope " << FLOWSCOPE_VERSION << "\n";
    return kExitOk;
  }
  if (!action) {
    emit_error(err, "cli.UsageError", "a subcommand is required");
    return kExitUsage;
  }

  set_thread_count(ctx.threads);
  try {
    action();
  } catch (const Usage& e) {
    emit_error(err, "cli.UsageError", e.what());
    return kExitUsage;
  } catch (const SchemaError& e) {
    emit_error(err, e.qualified_code(), e.what(), {{"file", e.file()}, {"line", e.line()}, {"field", e.field()}});
    return kExitError;
  } catch (const Error& e) {
    emit_error(err, e.qualified_code(), e.what());
    return kExitError;
  } catch (const std::filesystem::filesystem_error& e) {
    emit_error(err, "cli.IoError", e.what());
    return kExitError;
  }
  return kExitOk;
}

}  // namespace flowscope::cli
