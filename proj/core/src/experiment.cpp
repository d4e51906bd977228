#include <otfsprony/experiment.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include <otfsprony/errors.hpp>
#include <otfsprony/rng.hpp>

#include "artifacts.hpp"
#include "svg_plot.hpp"

#ifndef OTFSPRONY_VERSION_STRING
#define OTFSPRONY_VERSION_STRING "0.0.0"
#endif

namespace otfsprony
{
namespace
{

using json         = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using detail::Cell;
using detail::Table;

constexpr const char* seeding_rule =
    "trial_seed = derive_seed(master, trial); noise_seed = derive_seed(trial_seed, 1 + snr_index); "
    "derive_seed(s, i) = splitmix64(splitmix64(s) + i * 0x9e3779b97f4a7c15); generator mt19937_64";

/* ---------- scenario parsing ---------- */

[[noreturn]] void bad(const std::string& where, const std::string& what)
{
    throw InvalidArgument("scenario: " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
    {
        bad(where, "expected an object");
    }
    for (const auto& [key, value] : obj.items())
    {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* a) { return key == a; });
        if (!known)
        {
            bad(where, "unknown key '" + key + "'");
        }
    }
}

std::uint64_t get_unsigned(const json& v, const std::string& where)
{
    if (!v.is_number_unsigned())
    {
        if (v.is_number_integer() && v.get<long long>() >= 0)
        {
            return v.get<std::uint64_t>();
        }
        bad(where, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

double get_number(const json& v, const std::string& where)
{
    if (!v.is_number())
    {
        bad(where, "expected a number");
    }
    return v.get<double>();
}

std::string get_string(const json& v, const std::string& where)
{
    if (!v.is_string())
    {
        bad(where, "expected a string");
    }
    return v.get<std::string>();
}

std::optional<std::size_t> get_optional_count(const json& v, const std::string& where)
{
    if (v.is_null())
    {
        return std::nullopt;
    }
    return static_cast<std::size_t>(get_unsigned(v, where));
}

std::optional<double> get_snr(const json& v, const std::string& where)
{
    if (v.is_null())
    {
        return std::nullopt;
    }
    return get_number(v, where);
}

GainLaw parse_gain_law(const std::string& name)
{
    if (name == "complex_gaussian")
    {
        return GainLaw::complex_gaussian;
    }
    if (name == "unit_modulus")
    {
        return GainLaw::unit_modulus;
    }
    bad("channel.gain_law", "expected complex_gaussian or unit_modulus, got '" + name + "'");
}

const char* gain_law_name(GainLaw law)
{
    return law == GainLaw::unit_modulus ? "unit_modulus" : "complex_gaussian";
}

SampleSize parse_sample_size(const std::string& name)
{
    if (name == "repetitions")
    {
        return SampleSize::repetitions;
    }
    if (name == "stacked_rows")
    {
        return SampleSize::stacked_rows;
    }
    bad("order.sample_size", "expected repetitions or stacked_rows, got '" + name + "'");
}

const char* sample_size_name(SampleSize s)
{
    return s == SampleSize::stacked_rows ? "stacked_rows" : "repetitions";
}

PronyMode parse_mode(const std::string& name)
{
    if (name == "constrained")
    {
        return PronyMode::constrained;
    }
    if (name == "min_norm")
    {
        return PronyMode::min_norm;
    }
    bad("order.mode", "expected constrained or min_norm, got '" + name + "'");
}

const char* mode_name(PronyMode m)
{
    return m == PronyMode::min_norm ? "min_norm" : "constrained";
}

ordered_json spec_json(const ExperimentSpec& s)
{
    ordered_json j;
    j["name"] = s.name;
    j["grid"] = {{"N", s.grid.repetitions},
                 {"M", s.grid.subchannels},
                 {"T", s.grid.slot_duration}};
    j["channel"] = {{"paths", s.channel.paths},
                    {"delay_range", s.channel.delay_range},
                    {"doppler_range", s.channel.doppler_range},
                    {"gain_law", gain_law_name(s.channel.gain_law)}};
    ordered_json snr = ordered_json::array();
    for (const auto& v : s.snr_db)
    {
        snr.push_back(v ? ordered_json(*v) : ordered_json());
    }
    j["snr_db"] = snr;
    ordered_json order;
    order["strategy"] = std::string(to_string(s.strategy));
    order["p_hat"]    = s.p_hat ? ordered_json(*s.p_hat) : ordered_json();
    order["p_hat_init"]      = s.p_hat_init;
    order["sample_size"]     = sample_size_name(s.sample_size);
    order["prune_threshold"] = s.prune_threshold;
    order["mode"]            = mode_name(s.mode);
    j["order"]  = order;
    j["stage2"] = {{"L", s.delays_per_doppler}};
    j["sweep"]  = {{"p_hat_max", s.p_hat_max ? ordered_json(*s.p_hat_max) : ordered_json()}};
    j["evaluation"] = {{"match_radius", s.match_radius}};
    j["trials"]     = s.trials;
    j["seed"]       = s.seed;
    j["output_dir"] = s.output_dir;
    j["plots"]      = s.plots;
    return j;
}

/* ---------- statistics helpers ---------- */

double median(std::vector<double> v)
{
    std::erase_if(v, [](double x) { return std::isnan(x); });
    if (v.empty())
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v)
{
    double sum      = 0;
    std::size_t cnt = 0;
    for (const double x : v)
    {
        if (!std::isnan(x))
        {
            sum += x;
            ++cnt;
        }
    }
    return cnt > 0 ? sum / static_cast<double>(cnt) : std::numeric_limits<double>::quiet_NaN();
}

ordered_json number_or_null(double x)
{
    return std::isfinite(x) ? ordered_json(x) : ordered_json();
}

ordered_json histogram(const std::vector<std::size_t>& values)
{
    std::map<std::size_t, std::size_t> counts;
    for (const auto v : values)
    {
        ++counts[v];
    }
    ordered_json out = ordered_json::object();
    for (const auto& [k, c] : counts)
    {
        out[std::to_string(k)] = c;
    }
    return out;
}

Cell snr_cell(const std::optional<double>& snr)
{
    return snr ? Cell(*snr) : Cell(std::numeric_limits<double>::quiet_NaN());
}

std::string snr_label(const std::optional<double>& snr)
{
    return snr ? detail::format_double(*snr) + " dB" : std::string("noiseless");
}

std::string cell_stem(std::size_t trial, std::size_t snr_index)
{
    std::string index = std::to_string(trial);
    if (index.size() < 4)
    {
        index.insert(0, 4 - index.size(), '0');
    }
    return "trial_" + index + "_snr" + std::to_string(snr_index);
}

/* ---------- run plumbing ---------- */

class Emitter
{
public:
    Emitter(const ExperimentSpec& spec, const RunOptions& options, std::string subcommand)
        : spec_(spec), options_(options), subcommand_(std::move(subcommand))
    {
        dir_ = options.out_dir.empty() ? std::filesystem::path(spec.output_dir)
                                       : options.out_dir;
    }

    void text(const std::filesystem::path& relative, const std::string& content)
    {
        detail::write_file(dir_, relative, content);
        files_.insert(relative.generic_string());
    }

    void table(const std::string& stem, const Table& t)
    {
        if (options_.format == OutputFormat::json)
        {
            text(stem + ".json", t.to_json());
        }
        else
        {
            text(stem + ".csv", t.to_csv());
        }
    }

    void json_file(const std::string& relative, const ordered_json& j)
    {
        text(relative, j.dump(2) + "\n");
    }

    RunSummary finish()
    {
        ordered_json manifest;
        manifest["tool"]       = "otfs-prony";
        manifest["version"]    = library_version();
        manifest["subcommand"] = subcommand_;
        manifest["seed"]       = spec_.seed;
        manifest["trials"]     = spec_.trials;
        manifest["format"] = options_.format == OutputFormat::json ? "json" : "csv";
        manifest["seeding"] = seeding_rule;
        manifest["spec"]    = spec_json(spec_);
        manifest["files"]   = std::vector<std::string>(files_.begin(), files_.end());
        detail::write_file(dir_, "manifest.json", manifest.dump(2) + "\n");

        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm utc{};
        gmtime_r(&now, &utc);
        char stamp[32];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
        ordered_json meta;
        meta["generated_at"] = stamp;
        meta["command_line"] = options_.command_line;
        meta["threads"]      = options_.threads;
        detail::write_file(dir_, "metadata.json", meta.dump(2) + "\n");

        RunSummary summary;
        summary.out_dir = dir_;
        files_.insert("manifest.json");
        files_.insert("metadata.json");
        for (const auto& f : files_)
        {
            summary.files.emplace_back(f);
        }
        return summary;
    }

private:
    const ExperimentSpec& spec_;
    const RunOptions& options_;
    std::string subcommand_;
    std::filesystem::path dir_;
    std::set<std::string> files_;
};

/// Runs fn(trial, snr_index) for every cell and returns results in cell order.
template <class Result, class Fn>
std::vector<Result> run_cells(const ExperimentSpec& spec, const RunOptions& options, Fn fn)
{
    const std::size_t per_trial = spec.snr_db.size();
    std::vector<std::optional<Result>> slots(spec.trials * per_trial);
    detail::parallel_for(spec.trials, options.threads, [&](std::size_t trial) {
        for (std::size_t j = 0; j < per_trial; ++j)
        {
            slots[trial * per_trial + j].emplace(fn(make_trial(spec, trial, j)));
        }
    });
    std::vector<Result> results;
    results.reserve(slots.size());
    for (auto& s : slots)
    {
        results.push_back(std::move(*s));
    }
    return results;
}

constexpr std::size_t max_plotted_trials = 8;

} // namespace

std::string library_version()
{
    return OTFSPRONY_VERSION_STRING;
}

void ExperimentSpec::validate() const
{
    const PilotConfig cfg = grid.config();
    const std::size_t N   = cfg.repetitions();
    const std::size_t M   = cfg.subchannels();
    if (name.empty())
    {
        bad("name", "must not be empty");
    }
    if (!(channel.delay_range > 0.0 && channel.delay_range <= 1.0))
    {
        bad("channel.delay_range", "must lie in (0, 1]");
    }
    if (!(channel.doppler_range > 0.0 && channel.doppler_range <= 1.0))
    {
        bad("channel.doppler_range", "must lie in (0, 1]");
    }
    if (snr_db.empty())
    {
        bad("snr_db", "must list at least one entry");
    }
    for (const auto& s : snr_db)
    {
        if (s && !std::isfinite(*s))
        {
            bad("snr_db", "entries must be finite or null");
        }
    }
    if (p_hat && (*p_hat < 1 || *p_hat > N - 1))
    {
        bad("order.p_hat", "must lie in [1, N-1]");
    }
    if (p_hat_init > N - 1)
    {
        bad("order.p_hat_init", "must be 0 (default) or lie in [1, N-1]");
    }
    if (!(prune_threshold >= 0.0 && prune_threshold <= 1.0))
    {
        bad("order.prune_threshold", "must lie in [0, 1]");
    }
    if (delays_per_doppler < 1 || delays_per_doppler > M / 2 - 1)
    {
        bad("stage2.L", "must lie in [1, M/2 - 1]");
    }
    if (p_hat_max && (*p_hat_max < 1 || *p_hat_max > N - 1))
    {
        bad("sweep.p_hat_max", "must lie in [1, N-1]");
    }
    if (!(match_radius > 0.0) || !std::isfinite(match_radius))
    {
        bad("evaluation.match_radius", "must be positive");
    }
    if (trials < 1)
    {
        bad("trials", "must be at least 1");
    }
}

EstimatorOptions ExperimentSpec::estimator_options() const
{
    EstimatorOptions o;
    o.p_hat      = p_hat;
    o.strategy   = strategy;
    o.p_hat_init = p_hat_init;
    if (channel.paths > 0)
    {
        o.expected_paths = channel.paths;
    }
    o.sample_size        = sample_size;
    o.delays_per_doppler = delays_per_doppler;
    o.prune_threshold    = prune_threshold;
    o.mode               = mode;
    return o;
}

ExperimentSpec parse_experiment_spec(const std::string& json_text)
{
    json root;
    try
    {
        root = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw InvalidArgument(std::string("scenario: malformed JSON: ") + e.what());
    }
    check_keys(root, "top level",
               {"name", "grid", "channel", "snr_db", "order", "stage2", "sweep",
                "evaluation", "trials", "seed", "output_dir", "plots"});

    ExperimentSpec s;
    if (root.contains("name"))
    {
        s.name = get_string(root["name"], "name");
    }
    if (root.contains("grid"))
    {
        const json& g = root["grid"];
        check_keys(g, "grid", {"N", "M", "T"});
        if (g.contains("N")) s.grid.repetitions = get_unsigned(g["N"], "grid.N");
        if (g.contains("M")) s.grid.subchannels = get_unsigned(g["M"], "grid.M");
        if (g.contains("T")) s.grid.slot_duration = get_number(g["T"], "grid.T");
    }
    if (root.contains("channel"))
    {
        const json& c = root["channel"];
        check_keys(c, "channel", {"paths", "delay_range", "doppler_range", "gain_law"});
        if (c.contains("paths")) s.channel.paths = get_unsigned(c["paths"], "channel.paths");
        if (c.contains("delay_range"))
            s.channel.delay_range = get_number(c["delay_range"], "channel.delay_range");
        if (c.contains("doppler_range"))
            s.channel.doppler_range = get_number(c["doppler_range"], "channel.doppler_range");
        if (c.contains("gain_law"))
            s.channel.gain_law = parse_gain_law(get_string(c["gain_law"], "channel.gain_law"));
    }
    if (root.contains("snr_db"))
    {
        const json& v = root["snr_db"];
        s.snr_db.clear();
        if (v.is_array())
        {
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                s.snr_db.push_back(get_snr(v[i], "snr_db[" + std::to_string(i) + "]"));
            }
        }
        else
        {
            s.snr_db.push_back(get_snr(v, "snr_db"));
        }
    }
    if (root.contains("order"))
    {
        const json& o = root["order"];
        check_keys(o, "order",
                   {"strategy", "p_hat", "p_hat_init", "sample_size", "prune_threshold", "mode"});
        if (o.contains("strategy"))
        {
            try
            {
                s.strategy = parse_order_strategy(get_string(o["strategy"], "order.strategy"));
            }
            catch (const InvalidArgument& e)
            {
                bad("order.strategy", e.what());
            }
        }
        if (o.contains("p_hat")) s.p_hat = get_optional_count(o["p_hat"], "order.p_hat");
        if (o.contains("p_hat_init"))
            s.p_hat_init = get_unsigned(o["p_hat_init"], "order.p_hat_init");
        if (o.contains("sample_size"))
            s.sample_size = parse_sample_size(get_string(o["sample_size"], "order.sample_size"));
        if (o.contains("prune_threshold"))
            s.prune_threshold = get_number(o["prune_threshold"], "order.prune_threshold");
        if (o.contains("mode")) s.mode = parse_mode(get_string(o["mode"], "order.mode"));
    }
    if (root.contains("stage2"))
    {
        const json& st = root["stage2"];
        check_keys(st, "stage2", {"L"});
        if (st.contains("L")) s.delays_per_doppler = get_unsigned(st["L"], "stage2.L");
    }
    if (root.contains("sweep"))
    {
        const json& sw = root["sweep"];
        check_keys(sw, "sweep", {"p_hat_max"});
        if (sw.contains("p_hat_max"))
            s.p_hat_max = get_optional_count(sw["p_hat_max"], "sweep.p_hat_max");
    }
    if (root.contains("evaluation"))
    {
        const json& e = root["evaluation"];
        check_keys(e, "evaluation", {"match_radius"});
        if (e.contains("match_radius"))
            s.match_radius = get_number(e["match_radius"], "evaluation.match_radius");
    }
    if (root.contains("trials")) s.trials = get_unsigned(root["trials"], "trials");
    if (root.contains("seed")) s.seed = get_unsigned(root["seed"], "seed");
    if (root.contains("output_dir")) s.output_dir = get_string(root["output_dir"], "output_dir");
    if (root.contains("plots"))
    {
        if (!root["plots"].is_boolean())
        {
            bad("plots", "expected true or false");
        }
        s.plots = root["plots"].get<bool>();
    }
    s.validate();
    return s;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw IoError("cannot open scenario file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
    {
        throw IoError("cannot read scenario file " + path.string());
    }
    return parse_experiment_spec(buffer.str());
}

std::string to_json(const ExperimentSpec& spec)
{
    return spec_json(spec).dump(2) + "\n";
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial)
{
    return derive_seed(master, trial);
}

std::uint64_t noise_seed(std::uint64_t trial_seed_value, std::size_t snr_index)
{
    return derive_seed(trial_seed_value, 1 + snr_index);
}

TrialInput make_trial(const ExperimentSpec& spec, std::size_t trial, std::size_t snr_index)
{
    if (snr_index >= spec.snr_db.size())
    {
        throw InvalidArgument("make_trial: SNR index out of range");
    }
    const PilotConfig cfg = spec.grid.config();
    TrialInput in{.trial = trial,
                  .snr_index = snr_index,
                  .seed = trial_seed(spec.seed, trial),
                  .channel = {},
                  .grid = {ComplexMatrix(), cfg}};
    Rng rng(in.seed);
    if (spec.channel.paths > 0)
    {
        in.channel.paths = draw_channel(rng, spec.channel.paths, cfg, spec.channel.delay_range,
                                        spec.channel.doppler_range, spec.channel.gain_law);
    }
    in.channel.snr_db = spec.snr_db[snr_index];
    in.channel.seed   = noise_seed(in.seed, snr_index);
    in.grid           = synthesize_received(cfg, in.channel);
    return in;
}

OutputFormat parse_output_format(const std::string& name)
{
    if (name == "csv")
    {
        return OutputFormat::csv;
    }
    if (name == "json")
    {
        return OutputFormat::json;
    }
    throw InvalidArgument("unknown output format '" + name + "' (expected csv or json)");
}

/* ---------- residual-sweep ---------- */

RunSummary run_residual_sweep(const ExperimentSpec& spec, const RunOptions& options)
{
    spec.validate();
    const PilotConfig cfg     = spec.grid.config();
    const std::size_t p_max   = spec.p_hat_max.value_or(cfg.repetitions() - 1);
    const std::size_t per_snr = spec.snr_db.size();

    struct Cellresult
    {
        std::uint64_t seed = 0;
        OrderTrace trace;
    };
    const auto results = run_cells<Cellresult>(spec, options, [&](const TrialInput& in) {
        return Cellresult{in.seed, rss_curve(in.grid, p_max, spec.sample_size)};
    });

    Emitter out(spec, options, "residual-sweep");
    const std::vector<std::string> columns = {"p_hat", "rss", "t_norm_sq", "normalized_rss"};
    Table all{{"trial", "seed", "snr_db", "p_hat", "rss", "t_norm_sq", "normalized_rss"}, {}};
    for (std::size_t t = 0; t < spec.trials; ++t)
    {
        for (std::size_t j = 0; j < per_snr; ++j)
        {
            const auto& r = results[t * per_snr + j];
            Table curve{columns, {}};
            for (const auto& rec : r.trace.records)
            {
                curve.add({static_cast<long long>(rec.p_hat), rec.rss, rec.t_norm_sq,
                           rec.normalized_rss()});
                all.add({static_cast<long long>(t), std::to_string(r.seed),
                         snr_cell(spec.snr_db[j]), static_cast<long long>(rec.p_hat), rec.rss,
                         rec.t_norm_sq, rec.normalized_rss()});
            }
            out.table("rss/" + cell_stem(t, j), curve);
        }
    }
    out.table("rss_curves", all);

    ordered_json summary;
    summary["scenario"] = spec.name;
    summary["p_hat_max"] = p_max;
    ordered_json per = ordered_json::array();
    for (std::size_t j = 0; j < per_snr; ++j)
    {
        ordered_json entry;
        entry["snr_db"] = spec.snr_db[j] ? ordered_json(*spec.snr_db[j]) : ordered_json();
        ordered_json med_rss  = ordered_json::array();
        ordered_json med_drop = ordered_json::array();
        for (std::size_t k = 0; k < p_max; ++k)
        {
            std::vector<double> values;
            std::vector<double> drops;
            for (std::size_t t = 0; t < spec.trials; ++t)
            {
                const auto& recs = results[t * per_snr + j].trace.records;
                values.push_back(recs[k].normalized_rss());
                if (k + 1 < recs.size())
                {
                    drops.push_back(std::log10(std::max(recs[k].rss, rss_floor)) -
                                    std::log10(std::max(recs[k + 1].rss, rss_floor)));
                }
            }
            med_rss.push_back({{"p_hat", k + 1}, {"median_normalized_rss", number_or_null(median(values))}});
            if (!drops.empty())
            {
                med_drop.push_back({{"p_hat", k + 1}, {"median_log10_drop", number_or_null(median(drops))}});
            }
        }
        entry["median_normalized_rss"] = med_rss;
        entry["median_log10_drop"]     = med_drop;
        per.push_back(entry);
    }
    summary["per_snr"] = per;
    out.json_file("summary.json", summary);

    if (spec.plots)
    {
        for (std::size_t j = 0; j < per_snr; ++j)
        {
            std::vector<detail::Series> series;
            for (std::size_t t = 0; t < spec.trials; ++t)
            {
                detail::Series s;
                s.label = "trial " + std::to_string(t);
                for (const auto& rec : results[t * per_snr + j].trace.records)
                {
                    s.points.emplace_back(static_cast<double>(rec.p_hat),
                                          std::max(rec.normalized_rss(), 1e-40));
                }
                series.push_back(std::move(s));
            }
            out.text("plots/rss_snr" + std::to_string(j) + ".svg",
                     detail::render_plot({"Normalized residual vs model order (" +
                                              snr_label(spec.snr_db[j]) + ")",
                                          "P_hat", "rss / ||T||^2", true},
                                         series));
        }
    }
    return out.finish();
}

/* ---------- estimate ---------- */

RunSummary run_estimation(const ExperimentSpec& spec, const RunOptions& options)
{
    spec.validate();
    const PilotConfig cfg         = spec.grid.config();
    const std::size_t per_snr     = spec.snr_db.size();
    const EstimatorOptions eopts  = spec.estimator_options();
    const double ts               = cfg.sampling_interval();
    const double fbin             = cfg.doppler_bin();

    struct Cellresult
    {
        TrialInput input;
        EstimationReport report;
        MatchResult match;
        MetricsRow metrics;
        std::string status = "ok";
    };
    auto results = run_cells<Cellresult>(spec, options, [&](const TrialInput& in) {
        Cellresult r{in, {}, {}, {}, "ok"};
        try
        {
            r.report = estimate_full(in.grid, eopts);
        }
        catch (const DegenerateLeadingCoefficient& e)
        {
            r.status = e.what();
        }
        catch (const IllConditionedDopplerSet& e)
        {
            r.status = e.what();
        }
        r.match   = match_paths(in.channel.paths, r.report.paths, cfg, spec.match_radius);
        r.metrics = score(in.channel.paths, r.report, cfg, spec.match_radius, spec.name, in.seed);
        return r;
    });

    Emitter out(spec, options, "estimate");
    Table metrics{{"scenario", "trial", "seed", "snr_db", "true_paths", "p_hat", "rmse_delay",
                   "rmse_doppler", "detection_rate", "ghost_rate", "status"},
                  {}};
    for (std::size_t t = 0; t < spec.trials; ++t)
    {
        for (std::size_t j = 0; j < per_snr; ++j)
        {
            const auto& r = results[t * per_snr + j];
            const auto& m = r.metrics;
            metrics.add({m.scenario, static_cast<long long>(t), std::to_string(m.seed),
                         snr_cell(spec.snr_db[j]), static_cast<long long>(m.true_paths),
                         static_cast<long long>(m.p_hat), m.rmse_delay, m.rmse_doppler,
                         m.detection_rate, m.ghost_rate, r.status});

            std::vector<long long> truth_partner(r.input.channel.paths.size(), -1);
            std::vector<long long> est_partner(r.report.paths.size(), -1);
            for (const auto& p : r.match.pairs)
            {
                truth_partner[p.truth] = static_cast<long long>(p.estimate);
                est_partner[p.estimate] = static_cast<long long>(p.truth);
            }
            Table scatter{{"source", "index", "delay_bins", "doppler_bins", "delay_s",
                           "doppler_hz", "gain_re", "gain_im", "matched"},
                          {}};
            for (std::size_t i = 0; i < r.input.channel.paths.size(); ++i)
            {
                const auto& p = r.input.channel.paths[i];
                scatter.add({std::string("true"), static_cast<long long>(i), p.delay / ts,
                             p.doppler / fbin, p.delay, p.doppler, p.gain.real(), p.gain.imag(),
                             truth_partner[i]});
            }
            for (std::size_t i = 0; i < r.report.paths.size(); ++i)
            {
                const auto& p = r.report.paths[i];
                scatter.add({std::string("estimate"), static_cast<long long>(i), p.delay / ts,
                             p.doppler / fbin, p.delay, p.doppler, p.gain.real(), p.gain.imag(),
                             est_partner[i]});
            }
            out.table("paths/" + cell_stem(t, j), scatter);

            const DDGrid dd = dd_map(r.input.grid);
            Table map{{"doppler_index", "delay_index", "magnitude"}, {}};
            for (Index k = 0; k < dd.rows(); ++k)
            {
                for (Index l = 0; l < dd.cols(); ++l)
                {
                    map.add({static_cast<long long>(k), static_cast<long long>(l),
                             std::abs(dd(k, l))});
                }
            }
            out.table("ddmap/" + cell_stem(t, j), map);

            if (spec.plots && t < max_plotted_trials)
            {
                detail::Series truth{"true", {}, true};
                detail::Series est{"estimate", {}, true};
                for (const auto& p : r.input.channel.paths)
                {
                    truth.points.emplace_back(p.delay / ts, p.doppler / fbin);
                }
                for (const auto& p : r.report.paths)
                {
                    est.points.emplace_back(p.delay / ts, p.doppler / fbin);
                }
                out.text("plots/scatter_" + cell_stem(t, j) + ".svg",
                         detail::render_plot({"True vs estimated paths (" +
                                                  snr_label(spec.snr_db[j]) + ")",
                                              "delay / T_s", "Doppler * N T", false},
                                             {truth, est}));
                out.text("plots/ddmap_" + cell_stem(t, j) + ".svg",
                         detail::render_heatmap({"|Y_DD| (" + snr_label(spec.snr_db[j]) + ")",
                                                 "delay index", "Doppler index", false},
                                                dd.cwiseAbs()));
            }
        }
    }
    out.table("metrics", metrics);

    ordered_json summary;
    summary["scenario"] = spec.name;
    summary["match_radius"] = spec.match_radius;
    ordered_json per = ordered_json::array();
    for (std::size_t j = 0; j < per_snr; ++j)
    {
        std::vector<double> detection;
        std::vector<double> ghost;
        std::vector<std::size_t> counts;
        double sq_delay   = 0;
        double sq_doppler = 0;
        std::size_t pairs = 0;
        std::size_t failures = 0;
        for (std::size_t t = 0; t < spec.trials; ++t)
        {
            const auto& r = results[t * per_snr + j];
            detection.push_back(r.metrics.detection_rate);
            ghost.push_back(r.metrics.ghost_rate);
            counts.push_back(r.metrics.p_hat);
            failures += r.status != "ok" ? 1 : 0;
            for (const auto& p : r.match.pairs)
            {
                sq_delay += std::pow(p.delay_error / ts, 2);
                sq_doppler += std::pow(p.doppler_error / fbin, 2);
                ++pairs;
            }
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        ordered_json entry;
        entry["snr_db"] = spec.snr_db[j] ? ordered_json(*spec.snr_db[j]) : ordered_json();
        entry["median_detection_rate"] = number_or_null(median(detection));
        entry["mean_detection_rate"]   = number_or_null(mean(detection));
        entry["mean_ghost_rate"]       = number_or_null(mean(ghost));
        entry["matched_pairs"]         = pairs;
        entry["pooled_rmse_delay_bins"] =
            number_or_null(pairs > 0 ? std::sqrt(sq_delay / static_cast<double>(pairs)) : nan);
        entry["pooled_rmse_doppler_bins"] =
            number_or_null(pairs > 0 ? std::sqrt(sq_doppler / static_cast<double>(pairs)) : nan);
        entry["estimated_path_histogram"] = histogram(counts);
        entry["failed_trials"] = failures;
        per.push_back(entry);
    }
    summary["per_snr"] = per;
    out.json_file("summary.json", summary);
    return out.finish();
}

/* ---------- order-select ---------- */

RunSummary run_order_selection(const ExperimentSpec& spec, const RunOptions& options)
{
    spec.validate();
    const std::size_t per_snr = spec.snr_db.size();

    OrderRequest request;
    request.strategy   = OrderStrategy::heuristic;
    request.p_hat_init = spec.p_hat_init;
    if (spec.channel.paths > 0)
    {
        request.expected_paths = spec.channel.paths;
    }
    request.prune_threshold = spec.prune_threshold;
    request.mode            = spec.mode;
    request.sample_size     = spec.sample_size;

    struct Cellresult
    {
        std::uint64_t seed = 0;
        std::size_t true_paths = 0;
        OrderTrace trace;
        std::size_t aic = 0;
        std::size_t bic = 0;
        std::size_t heuristic = 0;
        std::string status = "ok";
    };
    const auto results = run_cells<Cellresult>(spec, options, [&](const TrialInput& in) {
        Cellresult r;
        r.seed       = in.seed;
        r.true_paths = in.channel.paths.size();
        try
        {
            OrderSelection sel = select_order(in.grid, request);
            r.trace     = std::move(sel.trace);
            r.heuristic = sel.p_hat;
        }
        catch (const DegenerateLeadingCoefficient& e)
        {
            r.status = e.what();
        }
        catch (const IllConditionedDopplerSet& e)
        {
            r.status = e.what();
        }
        if (r.trace.records.empty())
        {
            r.trace = rss_curve(in.grid, in.grid.config.repetitions() - 1, spec.sample_size);
        }
        r.aic = r.trace.argmin_aic();
        r.bic = r.trace.argmin_bic();
        return r;
    });

    Emitter out(spec, options, "order-select");
    Table choices{{"trial", "seed", "snr_db", "true_paths", "aic", "bic", "heuristic", "status"},
                  {}};
    for (std::size_t t = 0; t < spec.trials; ++t)
    {
        for (std::size_t j = 0; j < per_snr; ++j)
        {
            const auto& r = results[t * per_snr + j];
            Table trace{{"p_hat", "rss", "aic", "bic"}, {}};
            for (const auto& rec : r.trace.records)
            {
                trace.add({static_cast<long long>(rec.p_hat), rec.rss, rec.aic, rec.bic});
            }
            out.table("order_trace/" + cell_stem(t, j), trace);
            choices.add({static_cast<long long>(t), std::to_string(r.seed),
                         snr_cell(spec.snr_db[j]), static_cast<long long>(r.true_paths),
                         static_cast<long long>(r.aic), static_cast<long long>(r.bic),
                         static_cast<long long>(r.heuristic), r.status});
        }
    }
    out.table("choices", choices);

    ordered_json summary;
    summary["scenario"] = spec.name;
    ordered_json per = ordered_json::array();
    for (std::size_t j = 0; j < per_snr; ++j)
    {
        std::vector<std::size_t> aic_choice;
        std::vector<std::size_t> bic_choice;
        std::vector<std::size_t> heuristic_choice;
        std::size_t bic_le_aic = 0;
        std::size_t agree      = 0;
        for (std::size_t t = 0; t < spec.trials; ++t)
        {
            const auto& r = results[t * per_snr + j];
            aic_choice.push_back(r.aic);
            bic_choice.push_back(r.bic);
            heuristic_choice.push_back(r.heuristic);
            bic_le_aic += r.bic <= r.aic ? 1 : 0;
            agree += (r.aic == r.true_paths && r.bic == r.true_paths &&
                      r.heuristic == r.true_paths)
                         ? 1
                         : 0;
        }
        auto med = [](const std::vector<std::size_t>& v) {
            return median(std::vector<double>(v.begin(), v.end()));
        };
        const double trials = static_cast<double>(spec.trials);
        ordered_json entry;
        entry["snr_db"] = spec.snr_db[j] ? ordered_json(*spec.snr_db[j]) : ordered_json();
        entry["aic_histogram"]        = histogram(aic_choice);
        entry["bic_histogram"]        = histogram(bic_choice);
        entry["heuristic_histogram"]  = histogram(heuristic_choice);
        entry["median_aic"]           = med(aic_choice);
        entry["median_bic"]           = med(bic_choice);
        entry["median_heuristic"]     = med(heuristic_choice);
        entry["fraction_bic_le_aic"]  = static_cast<double>(bic_le_aic) / trials;
        entry["fraction_all_agree_with_truth"] = static_cast<double>(agree) / trials;
        per.push_back(entry);
    }
    summary["per_snr"] = per;
    out.json_file("summary.json", summary);

    if (spec.plots)
    {
        for (std::size_t j = 0; j < per_snr; ++j)
        {
            for (std::size_t t = 0; t < std::min(spec.trials, max_plotted_trials); ++t)
            {
                const auto& r = results[t * per_snr + j];
                detail::Series a{"AIC", {}, false};
                detail::Series b{"BIC", {}, false};
                for (const auto& rec : r.trace.records)
                {
                    a.points.emplace_back(static_cast<double>(rec.p_hat), rec.aic);
                    b.points.emplace_back(static_cast<double>(rec.p_hat), rec.bic);
                }
                out.text("plots/aic_bic_" + cell_stem(t, j) + ".svg",
                         detail::render_plot({"AIC and BIC vs model order (" +
                                                  snr_label(spec.snr_db[j]) + ")",
                                              "P_hat", "criterion", false},
                                             {a, b}));
            }
        }
    }
    return out.finish();
}

} // namespace otfsprony
