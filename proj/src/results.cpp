#include "mnoma/results.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mnoma {

namespace {

struct FlagName {
    unsigned bit;
    const char* name;
};

constexpr FlagName kFlagNames[] = {
    {kFlagRminInfeasible, "rmin_infeasible"},
    {kFlagIwfCap, "iwf_cap"},
    {kFlagScaCap, "sca_cap"},
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(text);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

template <typename T>
T parse_number(const std::string& s) {
    T v{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw std::runtime_error("results: bad number '" + s + "'");
    return v;
}

}  // namespace

std::string flags_to_string(unsigned flags) {
    std::string out;
    for (const auto& f : kFlagNames) {
        if ((flags & f.bit) == 0) continue;
        if (!out.empty()) out += '|';
        out += f.name;
    }
    return out.empty() ? "none" : out;
}

unsigned flags_from_string(const std::string& text) {
    if (text == "none") return kFlagNone;
    unsigned flags = kFlagNone;
    for (const auto& part : split(text, '|')) {
        bool known = false;
        for (const auto& f : kFlagNames) {
            if (part == f.name) {
                flags |= f.bit;
                known = true;
            }
        }
        if (!known) throw std::runtime_error("results: unknown flag '" + part + "'");
    }
    return flags;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("results: cannot format number");
    return std::string(buf, ptr);
}

void write_results(std::ostream& os, const std::vector<TrialResult>& results) {
    if (results.empty()) throw std::invalid_argument("write_results: no results");
    os << kResultsHeader << '\n';
    for (const auto& r : results) {
        os << r.scheme << ',' << r.sweep_var << ',' << format_double(r.sweep_value) << ',' << r.trial << ','
           << r.seed << ',' << format_double(r.se_bps_hz) << ',' << format_double(r.fairness) << ','
           << format_double(r.sum_rate_bps) << ',' << flags_to_string(r.flags) << ',' << r.sca_iters << ','
           << format_double(r.ms) << '\n';
    }
}

void write_results(const std::string& path, const std::vector<TrialResult>& results) {
    if (results.empty()) throw std::invalid_argument("write_results: no results");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_results: cannot open " + path);
    write_results(os, results);
    os.flush();
    if (!os) throw std::runtime_error("write_results: write failed for " + path);
}

std::vector<TrialResult> read_results(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kResultsHeader) throw std::runtime_error("results: bad header");
    std::vector<TrialResult> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 11) throw std::runtime_error("results: expected 11 fields");
        TrialResult r;
        r.scheme = f[0];
        r.sweep_var = f[1];
        r.sweep_value = parse_number<double>(f[2]);
        r.trial = parse_number<int>(f[3]);
        r.seed = parse_number<std::uint64_t>(f[4]);
        r.se_bps_hz = parse_number<double>(f[5]);
        r.fairness = parse_number<double>(f[6]);
        r.sum_rate_bps = parse_number<double>(f[7]);
        r.flags = flags_from_string(f[8]);
        r.sca_iters = parse_number<int>(f[9]);
        r.ms = parse_number<double>(f[10]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace mnoma
