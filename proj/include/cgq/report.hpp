#pragma once

#include <string>
#include <vector>

#include "cgq/verify.hpp"

namespace cgq {

// Stable serialization of check reports. Timing lives only under "meta"; the
// body (everything else) is a pure function of the inputs, so identical runs
// produce byte-identical bodies.

// One JSON object without the meta block.
std::string report_body_json(const CheckReport& r);
// One JSON object including meta; one line, no trailing newline.
std::string report_json_line(const CheckReport& r);

// JSON-lines document (one report per line) or CSV with one row per residual.
// CSV carries no volatile fields at all.
std::string render_reports(const std::vector<CheckReport>& rs,
                           const std::string& format);

// Strips "meta" from each line of a JSON-lines document. Lets callers compare
// report files for determinism.
std::string strip_meta(const std::string& json_lines);

// Parses a JSON-lines document back into reports (body fields only).
std::vector<CheckReport> parse_reports(const std::string& json_lines);

// Writes via a temp file + rename so readers never observe partial output.
void write_text_atomic(const std::string& path, const std::string& text);

// 0 all pass, 1 any fail, 2 otherwise (some inconclusive).
int exit_code_for(const std::vector<CheckReport>& rs);

}  // namespace cgq
