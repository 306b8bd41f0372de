#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adacomm/types.hpp"

namespace adacomm {

enum class TruthKind : std::uint8_t { Idle, Sym0, Sym1, Preamble };

std::string truth_name(TruthKind kind);
TruthKind truth_from_name(const std::string& name);

// Ground-truth annotation for the symbol window starting at t_us.
struct TruthMark {
    std::int64_t t_us = 0;
    TruthKind kind = TruthKind::Idle;
};

struct Trace {
    std::vector<SampleVector> samples;  // time-sorted
    std::vector<TruthMark> truth;       // time-sorted, one per window

    std::size_t width() const { return samples.empty() ? 0 : samples.front().width(); }
};

// JSONL: one object per line, merged by time (annotations first at ties).
//   sample      {"t_us": <int>, "amps": [<float>; D]}
//   annotation  {"t_us": <int>, "truth": "sym0"|"sym1"|"idle"|"preamble"}
void write_trace_jsonl(const Trace& trace, std::ostream& out);
Trace read_trace_jsonl(std::istream& in);

void write_trace_file(const Trace& trace, const std::string& path);
Trace read_trace_file(const std::string& path);

}  // namespace adacomm
