#include "edfsim/primitives.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace edfsim {

double quantize(double x) {
    const double q = std::ldexp(std::nearbyint(std::ldexp(x, kQuantumBits)), -kQuantumBits);
    return q > 0 ? q : std::ldexp(1.0, -kQuantumBits);
}

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0; }

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("distribution: field '" + what + "' is not a number: '" + text + "'");
    }
}

}  // namespace

DistributionSpec DistributionSpec::exponential(double rate) {
    if (!positive_finite(rate)) throw InvalidArgument("exponential: rate must be positive");
    return {Family::exponential, {rate}};
}

DistributionSpec DistributionSpec::deterministic(double value) {
    if (!positive_finite(value)) throw InvalidArgument("deterministic: value must be positive");
    return {Family::deterministic, {value}};
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
    if (!positive_finite(lo) || !std::isfinite(hi) || hi < lo) {
        throw InvalidArgument("uniform: need 0 < lo <= hi");
    }
    return {Family::uniform, {lo, hi}};
}

DistributionSpec DistributionSpec::sequence(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("sequence: no values");
    for (double v : values) {
        if (!positive_finite(v)) throw InvalidArgument("sequence: values must be positive");
    }
    return {Family::sequence, std::move(values)};
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
    std::string s(text);
    boost::algorithm::trim(s);
    std::vector<std::string> tokens;
    boost::algorithm::split(tokens, s, boost::algorithm::is_space(), boost::algorithm::token_compress_on);
    if (tokens.empty() || tokens[0].empty()) throw InvalidArgument("distribution: empty specification");
    const std::string family = boost::algorithm::to_lower_copy(tokens[0]);
    std::map<std::string, std::string> fields;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        auto eq = tokens[i].find('=');
        if (eq == std::string::npos) throw InvalidArgument("distribution: expected key=value, got '" + tokens[i] + "'");
        fields[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
    }
    auto take = [&](const std::string& key) {
        auto it = fields.find(key);
        if (it == fields.end()) throw InvalidArgument("distribution: " + family + " is missing field '" + key + "'");
        std::string v = it->second;
        fields.erase(it);
        return v;
    };
    auto finish = [&](DistributionSpec spec) {
        if (!fields.empty()) {
            throw InvalidArgument("distribution: unknown field '" + fields.begin()->first + "' for " + family);
        }
        return spec;
    };
    if (family == "exponential") {
        if (fields.count("mean")) {
            return finish(exponential(1.0 / parse_number(take("mean"), "mean")));
        }
        return finish(exponential(parse_number(take("rate"), "rate")));
    }
    if (family == "deterministic") return finish(deterministic(parse_number(take("value"), "value")));
    if (family == "uniform") {
        double lo = parse_number(take("lo"), "lo");
        double hi = parse_number(take("hi"), "hi");
        return finish(uniform(lo, hi));
    }
    if (family == "sequence") {
        std::vector<std::string> parts;
        std::string list = take("values");
        boost::algorithm::split(parts, list, boost::algorithm::is_any_of(","));
        std::vector<double> values;
        for (auto& p : parts) values.push_back(parse_number(boost::algorithm::trim_copy(p), "values"));
        return finish(sequence(std::move(values)));
    }
    throw InvalidArgument("distribution: unknown family '" + tokens[0] + "'");
}

double DistributionSpec::mean() const {
    switch (family_) {
        case Family::exponential: return 1.0 / params_[0];
        case Family::deterministic: return params_[0];
        case Family::uniform: return 0.5 * (params_[0] + params_[1]);
        case Family::sequence: {
            Accumulator<double> acc;
            for (double v : params_) acc.add(v);
            return acc.value() / static_cast<double>(params_.size());
        }
    }
    return 0;
}

double DistributionSpec::variance() const {
    switch (family_) {
        case Family::exponential: return 1.0 / (params_[0] * params_[0]);
        case Family::deterministic: return 0.0;
        case Family::uniform: {
            const double w = params_[1] - params_[0];
            return w * w / 12.0;
        }
        case Family::sequence: {
            const double m = mean();
            Accumulator<double> acc;
            for (double v : params_) acc.add((v - m) * (v - m));
            return acc.value() / static_cast<double>(params_.size());
        }
    }
    return 0;
}

double DistributionSpec::lower() const {
    switch (family_) {
        case Family::exponential: return 0.0;
        case Family::deterministic: return params_[0];
        case Family::uniform: return params_[0];
        case Family::sequence: return *std::min_element(params_.begin(), params_.end());
    }
    return 0;
}

double DistributionSpec::upper() const {
    switch (family_) {
        case Family::exponential: return std::numeric_limits<double>::infinity();
        case Family::deterministic: return params_[0];
        case Family::uniform: return params_[1];
        case Family::sequence: return *std::max_element(params_.begin(), params_.end());
    }
    return 0;
}

std::optional<double> DistributionSpec::mgf(double s) const {
    switch (family_) {
        case Family::exponential:
            if (s >= params_[0]) return std::nullopt;
            return params_[0] / (params_[0] - s);
        case Family::deterministic: return std::exp(s * params_[0]);
        case Family::uniform: {
            const double a = params_[0], b = params_[1];
            if (s == 0.0 || a == b) return std::exp(s * a);
            return (std::exp(s * b) - std::exp(s * a)) / (s * (b - a));
        }
        case Family::sequence: {
            Accumulator<double> acc;
            for (double v : params_) acc.add(std::exp(s * v));
            return acc.value() / static_cast<double>(params_.size());
        }
    }
    return std::nullopt;
}

std::string DistributionSpec::to_string() const {
    std::ostringstream out;
    out.precision(17);
    switch (family_) {
        case Family::exponential: out << "exponential rate=" << params_[0]; break;
        case Family::deterministic: out << "deterministic value=" << params_[0]; break;
        case Family::uniform: out << "uniform lo=" << params_[0] << " hi=" << params_[1]; break;
        case Family::sequence:
            out << "sequence values=";
            for (std::size_t i = 0; i < params_.size(); ++i) out << (i ? "," : "") << params_[i];
            break;
    }
    return out.str();
}

double DistributionSpec::sample(Engine& engine, std::uint64_t index) const {
    switch (family_) {
        case Family::exponential:
            return quantize(boost::random::exponential_distribution<double>(params_[0])(engine));
        case Family::deterministic: return params_[0];
        case Family::uniform:
            if (params_[0] == params_[1]) return params_[0];
            return quantize(boost::random::uniform_real_distribution<double>(params_[0], params_[1])(engine));
        case Family::sequence: return params_[index % params_.size()];
    }
    return 0;
}

LeadTimeSpec::LeadTimeSpec(DistributionSpec dist) : dist_(std::move(dist)) {
    if (!(dist_.lower() > 0) || !std::isfinite(dist_.upper())) {
        throw InvalidArgument("lead time: support must be positive and bounded (exponential leads are not allowed)");
    }
}

CustomerSource::CustomerSource(std::uint64_t seed, StreamSpec spec)
    : spec_(std::move(spec)),
      arrivals_(make_engine(seed, Substream::interarrival)),
      services_(make_engine(seed, Substream::service)),
      leads_(make_engine(seed, Substream::lead)) {}

CustomerRecord CustomerSource::next() {
    CustomerRecord c;
    c.index = count_ + 1;
    c.u = spec_.interarrival.sample(arrivals_, count_);
    c.v = spec_.service.sample(services_, count_);
    c.L = spec_.lead.distribution().sample(leads_, count_);
    clock_ += c.u;
    c.S = clock_;
    c.d = c.S + c.L;
    ++count_;
    return c;
}

std::vector<CustomerRecord> generate_stream(std::uint64_t seed, const StreamSpec& spec, StreamBound bound) {
    if (!bound.count && !bound.horizon) throw InvalidArgument("generate_stream: need a count or a horizon");
    if (bound.horizon && !(*bound.horizon > 0)) throw InvalidArgument("generate_stream: horizon must be positive");
    if (bound.count && *bound.count == 0 && !bound.horizon) return {};
    CustomerSource source(seed, spec);
    std::vector<CustomerRecord> out;
    while (!bound.count || out.size() < *bound.count) {
        CustomerRecord c = source.next();
        if (bound.horizon && c.S > *bound.horizon) break;
        out.push_back(c);
    }
    return out;
}

std::vector<CustomerRecord> make_stream(const std::vector<double>& gaps, const std::vector<double>& services,
                                        const std::vector<double>& leads) {
    if (gaps.size() != services.size() || gaps.size() != leads.size()) {
        throw InvalidArgument("make_stream: gap, service and lead lists differ in length");
    }
    std::vector<CustomerRecord> out;
    double clock = 0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (!(gaps[i] >= 0) || !(services[i] > 0) || !(leads[i] > 0)) {
            throw InvalidArgument("make_stream: gaps must be nonnegative, services and leads positive");
        }
        clock += gaps[i];
        out.push_back({i + 1, gaps[i], services[i], leads[i], clock, clock + leads[i]});
    }
    return out;
}

TrafficParams traffic_params(const DistributionSpec& interarrival, const DistributionSpec& service) {
    TrafficParams p{};
    p.lambda = 1.0 / interarrival.mean();
    p.mu = 1.0 / service.mean();
    p.alpha = std::sqrt(interarrival.variance());
    p.beta = std::sqrt(service.variance());
    p.rho = p.lambda / p.mu;
    p.sigma2 = p.lambda * (interarrival.variance() + service.variance());
    if (!(p.sigma2 > 0)) {
        throw InvalidArgument("traffic_params: sigma^2 = 0 (both interarrival and service times are deterministic)");
    }
    p.theta = 2.0 * (1.0 - p.rho) / p.sigma2;
    return p;
}

}  // namespace edfsim
