#include "adacomm/trace_io.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>

#include "adacomm/errors.hpp"

namespace adacomm {

using nlohmann::json;

std::string truth_name(TruthKind kind) {
    switch (kind) {
        case TruthKind::Idle: return "idle";
        case TruthKind::Sym0: return "sym0";
        case TruthKind::Sym1: return "sym1";
        case TruthKind::Preamble: return "preamble";
    }
    return "idle";
}

TruthKind truth_from_name(const std::string& name) {
    if (name == "idle") return TruthKind::Idle;
    if (name == "sym0") return TruthKind::Sym0;
    if (name == "sym1") return TruthKind::Sym1;
    if (name == "preamble") return TruthKind::Preamble;
    throw ConfigError("unknown truth kind: " + name);
}

void write_trace_jsonl(const Trace& trace, std::ostream& out) {
    std::size_t si = 0;
    std::size_t ti = 0;
    while (si < trace.samples.size() || ti < trace.truth.size()) {
        const bool take_truth =
            ti < trace.truth.size() &&
            (si >= trace.samples.size() ||
             trace.truth[ti].t_us <= trace.samples[si].t_us);
        json line;
        if (take_truth) {
            line["t_us"] = trace.truth[ti].t_us;
            line["truth"] = truth_name(trace.truth[ti].kind);
            ++ti;
        } else {
            line["t_us"] = trace.samples[si].t_us;
            line["amps"] = trace.samples[si].values;
            ++si;
        }
        out << line.dump() << '\n';
    }
}

Trace read_trace_jsonl(std::istream& in) {
    Trace trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json obj = json::parse(line);
        if (obj.contains("truth")) {
            trace.truth.push_back(
                {obj.at("t_us").get<std::int64_t>(),
                 truth_from_name(obj.at("truth").get<std::string>())});
        } else {
            SampleVector s;
            s.t_us = obj.at("t_us").get<std::int64_t>();
            s.values = obj.at("amps").get<std::vector<double>>();
            trace.samples.push_back(std::move(s));
        }
    }
    return trace;
}

void write_trace_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open trace file for writing: " + path);
    write_trace_jsonl(trace, out);
}

Trace read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file: " + path);
    return read_trace_jsonl(in);
}

}  // namespace adacomm
