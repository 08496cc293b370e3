#include "flowcover/textio.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace flowcover {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::logic_error("format_double: conversion failed");
  return std::string(buf, end);
}

// One line under the knife. All parse errors carry the line number.
struct Cursor {
  const char* p = nullptr;
  const char* end = nullptr;
  std::size_t line_no = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
  }

  bool literal(std::string_view lit) {
    if (static_cast<std::size_t>(end - p) < lit.size() ||
        std::string_view(p, lit.size()) != lit)
      return false;
    p += lit.size();
    return true;
  }

  void expect(std::string_view lit) {
    if (!literal(lit)) fail("expected '" + std::string(lit) + "'");
  }

  std::uint64_t u64() {
    std::uint64_t v{};
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || next == p) fail("expected an unsigned integer");
    p = next;
    return v;
  }

  std::uint32_t u32(const char* what) {
    const std::uint64_t v = u64();
    if (v > 0xffffffffULL) fail(std::string(what) + " out of range");
    return static_cast<std::uint32_t>(v);
  }

  double f64() {
    double v{};
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || next == p) fail("expected a number");
    p = next;
    return v;
  }

  void expect_done() {
    if (p != end) fail("trailing characters");
  }
};

// Feeds non-blank lines one at a time.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(Cursor& cur) {
    while (std::getline(in_, buf_)) {
      ++line_no_;
      if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
      if (buf_.empty()) continue;
      cur = {buf_.data(), buf_.data() + buf_.size(), line_no_};
      return true;
    }
    return false;
  }

 private:
  std::istream& in_;
  std::string buf_;
  std::size_t line_no_ = 0;
};

std::vector<SwitchId> parse_path(Cursor& cur) {
  std::vector<SwitchId> path;
  path.push_back(cur.u32("switch id"));
  while (cur.literal(",")) path.push_back(cur.u32("switch id"));
  return path;
}

Flow parse_flow_fields(Cursor& cur) {
  Flow flow;
  cur.expect("id=");
  flow.id = cur.u32("flow id");
  cur.expect(" path=");
  flow.path = parse_path(cur);
  cur.expect(" vol=");
  flow.volume_bytes = cur.u64();
  cur.expect(" pkt=");
  flow.packet_size_bytes = cur.u32("packet size");
  cur.expect_done();
  return flow;
}

void write_flow_fields(std::ostream& out, const Flow& flow) {
  out << "id=" << flow.id << " path=";
  for (std::size_t i = 0; i < flow.path.size(); ++i) {
    if (i) out << ',';
    out << flow.path[i];
  }
  out << " vol=" << flow.volume_bytes << " pkt=" << flow.packet_size_bytes;
}

}  // namespace

void write_instance(std::ostream& out, const Instance& instance) {
  const Topology& topo = instance.topo;
  out << "topo n=" << topo.switch_count << "\n";
  for (SwitchId v = 0; v < topo.coordinates.size(); ++v) {
    out << "coord " << v << ' ' << format_double(topo.coordinates[v].x) << ' '
        << format_double(topo.coordinates[v].y) << "\n";
  }
  for (const Link& link : topo.links) out << "link " << link.u << ' ' << link.v << "\n";
  for (SwitchId v : topo.loss_switches) out << "loss " << v << "\n";
  for (const Flow& flow : instance.flows) {
    out << "flow ";
    write_flow_fields(out, flow);
    out << "\n";
  }
}

Instance read_instance(std::istream& in) {
  Instance instance;
  LineReader lines(in);
  Cursor cur;
  if (!lines.next(cur)) throw std::runtime_error("empty instance file");
  cur.expect("topo n=");
  instance.topo.switch_count = cur.u32("switch count");
  cur.expect_done();

  // Sections appear in canonical order: coord, link, loss, flow.
  enum Section { coords = 0, links = 1, losses = 2, flows = 3 };
  int section = coords;
  const auto enter = [&](int wanted, const Cursor& at) {
    if (section > wanted) at.fail("section out of order");
    section = wanted;
  };
  while (lines.next(cur)) {
    if (cur.literal("coord ")) {
      enter(coords, cur);
      const SwitchId v = cur.u32("switch id");
      if (v != instance.topo.coordinates.size()) cur.fail("coord ids must count up from 0");
      cur.expect(" ");
      const double x = cur.f64();
      cur.expect(" ");
      const double y = cur.f64();
      cur.expect_done();
      instance.topo.coordinates.push_back({x, y});
    } else if (cur.literal("link ")) {
      enter(links, cur);
      Link link;
      link.u = cur.u32("switch id");
      cur.expect(" ");
      link.v = cur.u32("switch id");
      cur.expect_done();
      instance.topo.links.push_back(link);
    } else if (cur.literal("loss ")) {
      enter(losses, cur);
      instance.topo.loss_switches.push_back(cur.u32("switch id"));
      cur.expect_done();
    } else if (cur.literal("flow ")) {
      enter(flows, cur);
      instance.flows.push_back(parse_flow_fields(cur));
    } else {
      cur.fail("unrecognized line");
    }
  }
  validate_topology(instance.topo);
  validate_flows(instance.topo, instance.flows);
  return instance;
}

void write_scheme(std::ostream& out, const PollingScheme& scheme) {
  for (SwitchId v : scheme.poll_all) out << "pollall " << v << "\n";
  for (const SinglePoll& sp : scheme.single_polls)
    out << "single " << sp.flow << ' ' << sp.sw << "\n";
}

PollingScheme read_scheme(std::istream& in) {
  PollingScheme scheme;
  LineReader lines(in);
  Cursor cur;
  bool in_singles = false;
  while (lines.next(cur)) {
    if (cur.literal("pollall ")) {
      if (in_singles) cur.fail("pollall lines must precede single lines");
      const SwitchId v = cur.u32("switch id");
      cur.expect_done();
      if (!scheme.poll_all.empty() && scheme.poll_all.back() >= v)
        cur.fail("pollall switches must be ascending");
      scheme.poll_all.push_back(v);
    } else if (cur.literal("single ")) {
      in_singles = true;
      SinglePoll sp;
      sp.flow = cur.u32("flow id");
      cur.expect(" ");
      sp.sw = cur.u32("switch id");
      cur.expect_done();
      if (!scheme.single_polls.empty() && scheme.single_polls.back().flow >= sp.flow)
        cur.fail("single polls must have ascending flow ids");
      scheme.single_polls.push_back(sp);
    } else {
      cur.fail("unrecognized line");
    }
  }
  return scheme;
}

void write_solution(std::ostream& out, const WeightedSetSystem& system,
                    const CoverSolution& solution, const std::vector<Flow>& flows) {
  for (std::uint32_t s : solution.chosen) {
    if (s >= system.sets.size())
      throw std::invalid_argument("write_solution: chosen set index out of range");
    const CandidateAction action = system.sets[s].action;
    if (action.kind == CandidateAction::Kind::poll_all) {
      out << "pollall " << action.id << "\n";
    } else {
      const Flow* flow = nullptr;
      for (const Flow& f : flows) {
        if (f.id == action.id) {
          flow = &f;
          break;
        }
      }
      if (!flow)
        throw std::invalid_argument("write_solution: singleton names an unknown flow");
      out << "single " << action.id << ' ' << flow->last_switch() << "\n";
    }
  }
}

void write_churn_trace(std::ostream& out, const std::vector<ChurnEvent>& events) {
  for (const ChurnEvent& event : events) {
    out << "t=" << event.round << ' ';
    if (event.kind == ChurnEvent::Kind::arrive) {
      out << "arrive ";
      write_flow_fields(out, event.flow);
    } else {
      out << "expire id=" << event.flow.id;
    }
    out << "\n";
  }
}

std::vector<ChurnEvent> read_churn_trace(std::istream& in) {
  std::vector<ChurnEvent> events;
  LineReader lines(in);
  Cursor cur;
  while (lines.next(cur)) {
    ChurnEvent event;
    cur.expect("t=");
    event.round = cur.u32("round");
    cur.expect(" ");
    if (cur.literal("arrive ")) {
      event.kind = ChurnEvent::Kind::arrive;
      event.flow = parse_flow_fields(cur);
    } else if (cur.literal("expire ")) {
      event.kind = ChurnEvent::Kind::expire;
      cur.expect("id=");
      event.flow.id = cur.u32("flow id");
      cur.expect_done();
    } else {
      cur.fail("expected 'arrive' or 'expire'");
    }
    if (!events.empty() && events.back().round > event.round)
      cur.fail("rounds must be non-decreasing");
    events.push_back(std::move(event));
  }
  return events;
}

namespace {

template <typename WriteFn>
void save_file(const std::string& path, WriteFn&& write) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::ifstream open_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return in;
}

}  // namespace

void save_instance(const std::string& path, const Instance& instance) {
  save_file(path, [&](std::ostream& out) { write_instance(out, instance); });
}

Instance load_instance(const std::string& path) {
  auto in = open_file(path);
  try {
    return read_instance(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_scheme(const std::string& path, const PollingScheme& scheme) {
  save_file(path, [&](std::ostream& out) { write_scheme(out, scheme); });
}

PollingScheme load_scheme(const std::string& path) {
  auto in = open_file(path);
  try {
    return read_scheme(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_churn_trace(const std::string& path, const std::vector<ChurnEvent>& events) {
  save_file(path, [&](std::ostream& out) { write_churn_trace(out, events); });
}

std::vector<ChurnEvent> load_churn_trace(const std::string& path) {
  auto in = open_file(path);
  try {
    return read_churn_trace(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace flowcover
