#include "edfsim/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace edfsim {

namespace {

namespace pt = boost::property_tree;

/// Maps (section, key) to the line it was read from.
class LineIndex {
public:
    LineIndex(const std::string& text, std::string source) : source_(std::move(source)) {
        std::istringstream in(text);
        std::string line, section;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            boost::trim(line);
            if (line.empty() || line[0] == ';' || line[0] == '#') continue;
            if (line.front() == '[' && line.back() == ']') {
                section = boost::trim_copy(line.substr(1, line.size() - 2));
                lines_[{section, ""}] = n;
                continue;
            }
            const auto eq = line.find('=');
            if (eq != std::string::npos) lines_[{section, boost::trim_copy(line.substr(0, eq))}] = n;
        }
    }

    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const {
        std::string where = source_;
        auto it = lines_.find({section, key});
        if (it != lines_.end()) where += ":" + std::to_string(it->second);
        throw ConfigError(where + ": [" + section + "] " + (key.empty() ? "" : key + ": ") + what);
    }

private:
    std::string source_;
    std::map<std::pair<std::string, std::string>, std::size_t> lines_;
};

class SectionReader {
public:
    SectionReader(const pt::ptree& tree, std::string name, const LineIndex& index, std::set<std::string> known)
        : tree_(tree), name_(std::move(name)), index_(index) {
        for (const auto& [key, child] : tree_) {
            if (!child.empty()) index_.fail(name_, key, "nested entries are not allowed");
            if (!known.count(key)) index_.fail(name_, key, "unknown field");
        }
    }

    std::optional<std::string> text(const std::string& key) const {
        auto v = tree_.get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return boost::trim_copy(*v);
    }

    template <class T>
    std::optional<T> number(const std::string& key) const {
        auto v = text(key);
        if (!v) return std::nullopt;
        try {
            return boost::lexical_cast<T>(*v);
        } catch (const boost::bad_lexical_cast&) {
            index_.fail(name_, key, "cannot read '" + *v + "' as a number");
        }
    }

    std::optional<bool> flag(const std::string& key) const {
        auto v = text(key);
        if (!v) return std::nullopt;
        const std::string s = boost::to_lower_copy(*v);
        if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
        if (s == "false" || s == "no" || s == "0" || s == "off") return false;
        index_.fail(name_, key, "expected true or false, got '" + *v + "'");
    }

    template <class T>
    std::optional<std::vector<T>> list(const std::string& key) const {
        auto v = text(key);
        if (!v) return std::nullopt;
        std::vector<std::string> parts;
        boost::split(parts, *v, boost::is_any_of(","));
        std::vector<T> out;
        for (auto& p : parts) {
            boost::trim(p);
            if (p.empty()) index_.fail(name_, key, "empty list entry");
            try {
                out.push_back(boost::lexical_cast<T>(p));
            } catch (const boost::bad_lexical_cast&) {
                index_.fail(name_, key, "cannot read '" + p + "' as a number");
            }
        }
        return out;
    }

    DistributionSpec distribution(const std::string& key) const {
        auto v = text(key);
        if (!v) index_.fail(name_, key, "missing field '" + key + "'");
        try {
            return DistributionSpec::parse(*v);
        } catch (const InvalidArgument& e) {
            index_.fail(name_, key, e.what());
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const { index_.fail(name_, key, what); }

private:
    const pt::ptree& tree_;
    std::string name_;
    const LineIndex& index_;
};

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& source) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    LineIndex index(text, source);
    pt::ptree tree;
    try {
        std::istringstream ini(text);
        pt::read_ini(ini, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }

    ExperimentConfig cfg;
    cfg.source = source;
    static const std::set<std::string> sections{"primitives", "run", "audit", "sweep", "diffusion", "output"};
    for (const auto& [name, child] : tree) {
        if (child.empty()) index.fail("", name, "entries must belong to a section");
        if (!sections.count(name)) index.fail(name, "", "unknown section");
    }
    const pt::ptree empty;
    auto section = [&](const char* name) -> const pt::ptree& {
        auto it = tree.find(name);
        return it == tree.not_found() ? empty : it->second;
    };

    if (tree.find("primitives") != tree.not_found()) {
        SectionReader r(section("primitives"), "primitives", index, {"interarrival", "service", "lead"});
        const DistributionSpec lead = r.distribution("lead");
        try {
            cfg.primitives = StreamSpec{r.distribution("interarrival"), r.distribution("service"), LeadTimeSpec(lead)};
        } catch (const ConfigError&) {
            throw;
        } catch (const InvalidArgument& e) {
            r.fail("lead", e.what());
        }
    }

    {
        SectionReader r(section("run"), "run", index,
                        {"policies", "horizon", "arrivals", "seeds", "sample_interval", "sample_measures", "rational",
                         "record_events", "write_measures", "warmup", "batches", "workers"});
        if (auto v = r.text("policies")) {
            std::vector<std::string> parts;
            boost::split(parts, *v, boost::is_any_of(","));
            cfg.run.policies.clear();
            for (auto& p : parts) {
                try {
                    cfg.run.policies.push_back(PolicySpec::parse(boost::trim_copy(p)));
                } catch (const InvalidArgument& e) {
                    r.fail("policies", e.what());
                }
            }
        }
        cfg.run.horizon = r.number<double>("horizon");
        cfg.run.arrivals = r.number<std::uint64_t>("arrivals");
        if (auto v = r.list<std::uint64_t>("seeds")) cfg.run.seeds = *v;
        cfg.run.sample_interval = r.number<double>("sample_interval");
        if (auto v = r.flag("sample_measures")) cfg.run.sample_measures = *v;
        if (auto v = r.flag("rational")) cfg.run.rational = *v;
        if (auto v = r.flag("record_events")) cfg.run.record_events = *v;
        if (auto v = r.flag("write_measures")) cfg.run.write_measures = *v;
        if (auto v = r.number<double>("warmup")) cfg.warmup = *v;
        if (auto v = r.number<std::size_t>("batches")) cfg.batches = *v;
        if (auto v = r.number<std::size_t>("workers")) cfg.workers = *v;

        if (cfg.run.horizon && !(*cfg.run.horizon > 0)) r.fail("horizon", "must be positive");
        if (cfg.run.arrivals && *cfg.run.arrivals == 0) r.fail("arrivals", "must be positive");
        if (cfg.run.seeds.empty()) r.fail("seeds", "at least one seed is required");
        if (cfg.run.sample_interval && !(*cfg.run.sample_interval > 0)) r.fail("sample_interval", "must be positive");
        if (!(cfg.warmup >= 0 && cfg.warmup < 1)) r.fail("warmup", "must lie in [0, 1)");
        if (cfg.batches < 10) r.fail("batches", "at least 10 batches are required");
        if (cfg.workers == 0) r.fail("workers", "must be positive");
    }

    {
        SectionReader r(section("audit"), "audit", index,
                        {"streams", "customers", "first_seed", "reference", "policies", "tolerance"});
        if (auto v = r.number<std::size_t>("streams")) cfg.audit.streams = *v;
        if (auto v = r.number<std::uint64_t>("customers")) cfg.audit.customers = *v;
        if (auto v = r.number<std::uint64_t>("first_seed")) cfg.audit.first_seed = *v;
        if (auto v = r.flag("reference")) cfg.audit.reference = *v;
        if (auto v = r.flag("policies")) cfg.audit.policies = *v;
        if (auto v = r.number<double>("tolerance")) cfg.audit.tolerance = *v;
        if (cfg.audit.streams == 0) r.fail("streams", "must be positive");
        if (cfg.audit.customers == 0) r.fail("customers", "must be positive");
        if (!(cfg.audit.tolerance >= 0)) r.fail("tolerance", "must be nonnegative");
    }

    if (tree.find("sweep") != tree.not_found()) {
        SectionReader r(section("sweep"), "sweep", index, {"lead_upper"});
        auto v = r.list<double>("lead_upper");
        if (!v) r.fail("lead_upper", "missing field 'lead_upper'");
        if (v->empty()) r.fail("lead_upper", "sweep list is empty");
        cfg.sweep = SweepBlock{*v};
    }

    if (tree.find("diffusion") != tree.not_found()) {
        SectionReader r(section("diffusion"), "diffusion", index,
                        {"gamma", "sigma2", "H0", "dt", "T", "seeds", "first_seed", "bins", "extrapolate"});
        DiffusionBlock d;
        if (auto v = r.list<double>("gamma")) d.gammas = *v;
        if (auto v = r.number<double>("sigma2")) d.sigma2 = *v;
        if (auto v = r.number<double>("H0")) d.barrier = *v;
        if (auto v = r.number<double>("dt")) d.dt = *v;
        if (auto v = r.number<double>("T")) d.horizon = *v;
        if (auto v = r.number<std::size_t>("seeds")) d.seeds = *v;
        if (auto v = r.number<std::uint64_t>("first_seed")) d.first_seed = *v;
        if (auto v = r.number<std::size_t>("bins")) d.histogram_bins = *v;
        if (auto v = r.flag("extrapolate")) d.extrapolate = *v;
        if (!(d.sigma2 > 0)) r.fail("sigma2", "must be positive");
        if (!(d.barrier > 0)) r.fail("H0", "must be positive");
        if (!(d.dt > 0)) r.fail("dt", "must be positive");
        if (!(d.horizon > 0)) r.fail("T", "must be positive");
        if (d.seeds < 2) r.fail("seeds", "at least two seeds are required");
        if (d.histogram_bins == 0) r.fail("bins", "must be positive");
        cfg.diffusion = d;
    }

    {
        SectionReader r(section("output"), "output", index, {"dir"});
        if (auto v = r.text("dir")) cfg.output_dir = *v;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse(in, path);
}

const StreamSpec& ExperimentConfig::require_primitives() const {
    if (!primitives) throw ConfigError(source + ": [primitives] section is required");
    return *primitives;
}

double ExperimentConfig::run_horizon() const {
    if (run.horizon) return *run.horizon;
    if (run.arrivals) return static_cast<double>(*run.arrivals) * require_primitives().interarrival.mean();
    throw ConfigError(source + ": [run] needs 'horizon' or 'arrivals'");
}

LeadTimeSpec lead_for_upper_bound(const LeadTimeSpec& base, double upper) {
    const double lower = base.y_lo();
    if (upper < lower) throw InvalidArgument("sweep: lead upper bound lies below the lower end");
    if (upper == lower) return LeadTimeSpec(DistributionSpec::deterministic(lower));
    return LeadTimeSpec(DistributionSpec::uniform(lower, upper));
}

}  // namespace edfsim
