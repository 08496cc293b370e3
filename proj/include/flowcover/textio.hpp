#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "flowcover/churn.hpp"
#include "flowcover/core.hpp"
#include "flowcover/setcover.hpp"

namespace flowcover {

// Line-oriented text formats for instances (topology + flows), polling
// schemes / cover solutions, and churn traces. The exact grammar lives in
// docs/file-formats.md. Writers emit the canonical form; readers accept
// exactly that grammar (sections in order, ids ascending) and validate every
// structural invariant, so write(read(s)) == s and read(write(x)) == x.

void write_instance(std::ostream& out, const Instance& instance);
Instance read_instance(std::istream& in);

void write_scheme(std::ostream& out, const PollingScheme& scheme);
PollingScheme read_scheme(std::istream& in);

// A cover solution serializes in the scheme format family: chosen poll-all
// sets as `pollall v`, chosen singletons as `single f v` with v the last
// switch of the flow's path (no redundancy dropping — this is the solution
// as chosen, not the decoded scheme).
void write_solution(std::ostream& out, const WeightedSetSystem& system,
                    const CoverSolution& solution, const std::vector<Flow>& flows);

void write_churn_trace(std::ostream& out, const std::vector<ChurnEvent>& events);
std::vector<ChurnEvent> read_churn_trace(std::istream& in);

// File wrappers; throw std::runtime_error when the path cannot be opened.
void save_instance(const std::string& path, const Instance& instance);
Instance load_instance(const std::string& path);
void save_scheme(const std::string& path, const PollingScheme& scheme);
PollingScheme load_scheme(const std::string& path);
void save_churn_trace(const std::string& path, const std::vector<ChurnEvent>& events);
std::vector<ChurnEvent> load_churn_trace(const std::string& path);

}  // namespace flowcover
