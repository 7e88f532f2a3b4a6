#include "hexcell/logs.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hexcell {

using nlohmann::json;

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

json ParamsJson(const HandoverParams& p) {
  return json::array({p.u_ca, p.z_ce, p.w_ce, p.z_pe, p.w_pe});
}

HandoverParams ParamsFrom(const json& j) {
  HandoverParams p;
  p.u_ca = j.at(0).get<int>();
  p.z_ce = j.at(1).get<int>();
  p.w_ce = j.at(2).get<int>();
  p.z_pe = j.at(3).get<int>();
  p.w_pe = j.at(4).get<int>();
  return p;
}

json EventJson(const HandoverEvent& e) {
  json j = {{"ue", e.ue},
            {"source", e.source},
            {"target", e.target},
            {"type", ToString(e.type)},
            {"report_slot", e.report_slot},
            {"execute_slot", e.execute_slot}};
  j["monitor_start_slot"] = e.monitor_start_slot ? json(*e.monitor_start_slot) : json(nullptr);
  return j;
}

HandoverEvent EventFrom(const json& j) {
  HandoverEvent e;
  e.ue = j.at("ue").get<int>();
  e.source = j.at("source").get<int>();
  e.target = j.at("target").get<int>();
  e.type = HandoverTypeFromString(j.at("type").get<std::string>());
  e.report_slot = j.at("report_slot").get<int>();
  e.execute_slot = j.at("execute_slot").get<int>();
  if (!j.at("monitor_start_slot").is_null()) {
    e.monitor_start_slot = j.at("monitor_start_slot").get<int>();
  }
  return e;
}

json ReportJson(const EpisodeReport& r) {
  json j = {{"ping_pong_ratio", r.ping_pong_ratio},
            {"system_throughput", r.system_throughput},
            {"low_rate_user_ratio", r.low_rate_user_ratio},
            {"total_handover_count", r.total_handover_count},
            {"episode_objective", r.episode_objective},
            {"intra_freq_neighbor_ratio", r.intra_freq_neighbor_ratio},
            {"mean_reward", r.mean_reward},
            {"ue_distribution_std", r.ue_distribution_std},
            {"average_ue_speed", r.average_ue_speed}};
  j["mean_handover_latency_s"] =
      r.mean_handover_latency_s ? json(*r.mean_handover_latency_s) : json(nullptr);
  return j;
}

EpisodeReport ReportFrom(const json& j) {
  EpisodeReport r;
  r.ping_pong_ratio = j.at("ping_pong_ratio").get<double>();
  r.system_throughput = j.at("system_throughput").get<double>();
  r.low_rate_user_ratio = j.at("low_rate_user_ratio").get<double>();
  r.total_handover_count = j.at("total_handover_count").get<int>();
  r.episode_objective = j.at("episode_objective").get<double>();
  r.intra_freq_neighbor_ratio = j.at("intra_freq_neighbor_ratio").get<double>();
  r.mean_reward = j.at("mean_reward").get<double>();
  r.ue_distribution_std = j.at("ue_distribution_std").get<double>();
  r.average_ue_speed = j.at("average_ue_speed").get<double>();
  if (!j.at("mean_handover_latency_s").is_null()) {
    r.mean_handover_latency_s = j.at("mean_handover_latency_s").get<double>();
  }
  return r;
}

// Minimal CSV reader for the files written here (no quoting needed).
std::vector<std::vector<std::string>> ParseCsv(const std::string& text,
                                               const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::runtime_error("unexpected CSV header: expected '" + header + "'");
  }
  std::size_t ncols = 1;
  for (char c : header) ncols += (c == ',');
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != ncols) {
      throw std::runtime_error("CSV row has " + std::to_string(cells.size()) +
                               " fields, expected " + std::to_string(ncols));
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

template <typename T>
T ParseNumber(const std::string& s, const char* what) {
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::runtime_error(std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

int64_t ToI64(const std::string& s) { return ParseNumber<int64_t>(s, "integer"); }
uint64_t ToU64(const std::string& s) { return ParseNumber<uint64_t>(s, "integer"); }
double ToF64(const std::string& s) { return ParseNumber<double>(s, "number"); }

const char* kEventHeader =
    "episode,ue,source,target,type,report_slot,execute_slot,monitor_start_slot";
const char* kLoadHeader =
    "episode,slot,cell,load,estimate,reward,exact_reward,gamma";
const char* kRateHeader = "episode,slot,ue,serving,rate_bps,request_bytes";
const char* kReportHeader =
    "episode,seed,episode_objective,ping_pong_ratio,mean_handover_latency_s,"
    "system_throughput,low_rate_user_ratio,total_handover_count,"
    "intra_freq_neighbor_ratio,mean_reward,ue_distribution_std,average_ue_speed";

}  // namespace

std::string EpisodesToJson(const std::vector<EpisodeRecord>& records) {
  json arr = json::array();
  for (const auto& rec : records) {
    const EpisodeLog& l = rec.log;
    json slots = json::array();
    for (const auto& s : l.slots) {
      json params = json::array();
      for (const auto& p : s.params) params.push_back(ParamsJson(p));
      slots.push_back({{"slot", s.slot},
                       {"load", s.load},
                       {"estimate", s.estimate},
                       {"reward", s.reward},
                       {"exact_reward", s.exact_reward},
                       {"gamma", s.gamma},
                       {"serving", s.serving},
                       {"rate_bps", s.rate_bps},
                       {"params", params}});
    }
    json events = json::array();
    for (const auto& e : l.events) events.push_back(EventJson(e));
    arr.push_back({{"episode", rec.episode},
                   {"seed", rec.seed},
                   {"slot_length", l.slot_length},
                   {"num_cells", l.num_cells},
                   {"num_ues", l.num_ues},
                   {"request_bytes", l.request_bytes},
                   {"ue_distribution_std", l.ue_distribution_std},
                   {"average_ue_speed", l.average_ue_speed},
                   {"slots", slots},
                   {"events", events},
                   {"report", ReportJson(rec.report)}});
  }
  return arr.dump() + "\n";
}

std::vector<EpisodeRecord> EpisodesFromJson(const std::string& text) {
  std::vector<EpisodeRecord> out;
  try {
    const json arr = json::parse(text);
    for (const auto& j : arr) {
      EpisodeRecord rec;
      rec.episode = j.at("episode").get<int64_t>();
      rec.seed = j.at("seed").get<uint64_t>();
      EpisodeLog& l = rec.log;
      l.slot_length = j.at("slot_length").get<double>();
      l.num_cells = j.at("num_cells").get<int>();
      l.num_ues = j.at("num_ues").get<int>();
      l.request_bytes = j.at("request_bytes").get<std::vector<double>>();
      l.ue_distribution_std = j.at("ue_distribution_std").get<double>();
      l.average_ue_speed = j.at("average_ue_speed").get<double>();
      for (const auto& s : j.at("slots")) {
        SlotRecord r;
        r.slot = s.at("slot").get<int>();
        r.load = s.at("load").get<std::vector<double>>();
        r.estimate = s.at("estimate").get<std::vector<double>>();
        r.reward = s.at("reward").get<std::vector<double>>();
        r.exact_reward = s.at("exact_reward").get<std::vector<double>>();
        r.gamma = s.at("gamma").get<double>();
        r.serving = s.at("serving").get<std::vector<int>>();
        r.rate_bps = s.at("rate_bps").get<std::vector<double>>();
        for (const auto& p : s.at("params")) r.params.push_back(ParamsFrom(p));
        l.slots.push_back(std::move(r));
      }
      for (const auto& e : j.at("events")) l.events.push_back(EventFrom(e));
      rec.report = ReportFrom(j.at("report"));
      out.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed episode log: ") + e.what());
  }
  return out;
}

std::vector<EventRow> FlattenEvents(const std::vector<EpisodeRecord>& records) {
  std::vector<EventRow> rows;
  for (const auto& r : records) {
    for (const auto& e : r.log.events) rows.push_back({r.episode, e});
  }
  return rows;
}

std::vector<LoadRow> FlattenLoads(const std::vector<EpisodeRecord>& records) {
  std::vector<LoadRow> rows;
  for (const auto& r : records) {
    for (const auto& s : r.log.slots) {
      for (std::size_t m = 0; m < s.load.size(); ++m) {
        rows.push_back({r.episode, s.slot, static_cast<int>(m), s.load[m],
                        s.estimate[m], s.reward[m], s.exact_reward[m], s.gamma});
      }
    }
  }
  return rows;
}

std::vector<RateRow> FlattenRates(const std::vector<EpisodeRecord>& records) {
  std::vector<RateRow> rows;
  for (const auto& r : records) {
    for (const auto& s : r.log.slots) {
      for (std::size_t k = 0; k < s.rate_bps.size(); ++k) {
        rows.push_back({r.episode, s.slot, static_cast<int>(k), s.serving[k],
                        s.rate_bps[k], r.log.request_bytes[k]});
      }
    }
  }
  return rows;
}

std::vector<ReportRow> FlattenReports(const std::vector<EpisodeRecord>& records) {
  std::vector<ReportRow> rows;
  for (const auto& r : records) rows.push_back({r.episode, r.seed, r.report});
  return rows;
}

std::string ToCsv(const std::vector<EventRow>& rows) {
  std::ostringstream os;
  os << kEventHeader << "\n";
  for (const auto& r : rows) {
    const auto& e = r.event;
    os << r.episode << ',' << e.ue << ',' << e.source << ',' << e.target << ','
       << ToString(e.type) << ',' << e.report_slot << ',' << e.execute_slot << ',';
    if (e.monitor_start_slot) os << *e.monitor_start_slot;
    os << "\n";
  }
  return os.str();
}

std::string ToCsv(const std::vector<LoadRow>& rows) {
  std::ostringstream os;
  os << kLoadHeader << "\n";
  for (const auto& r : rows) {
    os << r.episode << ',' << r.slot << ',' << r.cell << ',' << FormatDouble(r.load)
       << ',' << FormatDouble(r.estimate) << ',' << FormatDouble(r.reward) << ','
       << FormatDouble(r.exact_reward) << ',' << FormatDouble(r.gamma) << "\n";
  }
  return os.str();
}

std::string ToCsv(const std::vector<RateRow>& rows) {
  std::ostringstream os;
  os << kRateHeader << "\n";
  for (const auto& r : rows) {
    os << r.episode << ',' << r.slot << ',' << r.ue << ',' << r.serving << ','
       << FormatDouble(r.rate_bps) << ',' << FormatDouble(r.request_bytes) << "\n";
  }
  return os.str();
}

std::string ToCsv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << kReportHeader << "\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    os << row.episode << ',' << row.seed << ',' << FormatDouble(r.episode_objective)
       << ',' << FormatDouble(r.ping_pong_ratio) << ',';
    if (r.mean_handover_latency_s) os << FormatDouble(*r.mean_handover_latency_s);
    os << ',' << FormatDouble(r.system_throughput) << ','
       << FormatDouble(r.low_rate_user_ratio) << ',' << r.total_handover_count << ','
       << FormatDouble(r.intra_freq_neighbor_ratio) << ','
       << FormatDouble(r.mean_reward) << ',' << FormatDouble(r.ue_distribution_std)
       << ',' << FormatDouble(r.average_ue_speed) << "\n";
  }
  return os.str();
}

std::string ToJson(const std::vector<EventRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j = EventJson(r.event);
    j["episode"] = r.episode;
    arr.push_back(j);
  }
  return arr.dump(1) + "\n";
}

std::string ToJson(const std::vector<LoadRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"episode", r.episode},
                   {"slot", r.slot},
                   {"cell", r.cell},
                   {"load", r.load},
                   {"estimate", r.estimate},
                   {"reward", r.reward},
                   {"exact_reward", r.exact_reward},
                   {"gamma", r.gamma}});
  }
  return arr.dump(1) + "\n";
}

std::string ToJson(const std::vector<RateRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"episode", r.episode},
                   {"slot", r.slot},
                   {"ue", r.ue},
                   {"serving", r.serving},
                   {"rate_bps", r.rate_bps},
                   {"request_bytes", r.request_bytes}});
  }
  return arr.dump(1) + "\n";
}

std::string ToJson(const std::vector<ReportRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j = ReportJson(r.report);
    j["episode"] = r.episode;
    j["seed"] = r.seed;
    arr.push_back(j);
  }
  return arr.dump(1) + "\n";
}

std::vector<EventRow> EventsFromCsv(const std::string& text) {
  std::vector<EventRow> out;
  for (const auto& c : ParseCsv(text, kEventHeader)) {
    EventRow r;
    r.episode = ToI64(c[0]);
    r.event.ue = static_cast<int>(ToI64(c[1]));
    r.event.source = static_cast<int>(ToI64(c[2]));
    r.event.target = static_cast<int>(ToI64(c[3]));
    r.event.type = HandoverTypeFromString(c[4]);
    r.event.report_slot = static_cast<int>(ToI64(c[5]));
    r.event.execute_slot = static_cast<int>(ToI64(c[6]));
    if (!c[7].empty()) r.event.monitor_start_slot = static_cast<int>(ToI64(c[7]));
    out.push_back(r);
  }
  return out;
}

std::vector<EventRow> EventsFromJson(const std::string& text) {
  std::vector<EventRow> out;
  try {
    for (const auto& j : json::parse(text)) {
      out.push_back({j.at("episode").get<int64_t>(), EventFrom(j)});
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed events JSON: ") + e.what());
  }
  return out;
}

std::vector<LoadRow> LoadsFromCsv(const std::string& text) {
  std::vector<LoadRow> out;
  for (const auto& c : ParseCsv(text, kLoadHeader)) {
    out.push_back({ToI64(c[0]), static_cast<int>(ToI64(c[1])),
                   static_cast<int>(ToI64(c[2])), ToF64(c[3]), ToF64(c[4]),
                   ToF64(c[5]), ToF64(c[6]), ToF64(c[7])});
  }
  return out;
}

std::vector<LoadRow> LoadsFromJson(const std::string& text) {
  std::vector<LoadRow> out;
  try {
    for (const auto& j : json::parse(text)) {
      out.push_back({j.at("episode").get<int64_t>(), j.at("slot").get<int>(),
                     j.at("cell").get<int>(), j.at("load").get<double>(),
                     j.at("estimate").get<double>(), j.at("reward").get<double>(),
                     j.at("exact_reward").get<double>(), j.at("gamma").get<double>()});
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed loads JSON: ") + e.what());
  }
  return out;
}

std::vector<RateRow> RatesFromCsv(const std::string& text) {
  std::vector<RateRow> out;
  for (const auto& c : ParseCsv(text, kRateHeader)) {
    out.push_back({ToI64(c[0]), static_cast<int>(ToI64(c[1])),
                   static_cast<int>(ToI64(c[2])), static_cast<int>(ToI64(c[3])),
                   ToF64(c[4]), ToF64(c[5])});
  }
  return out;
}

std::vector<ReportRow> ReportsFromCsv(const std::string& text) {
  std::vector<ReportRow> out;
  for (const auto& c : ParseCsv(text, kReportHeader)) {
    ReportRow row;
    row.episode = ToI64(c[0]);
    row.seed = ToU64(c[1]);
    auto& r = row.report;
    r.episode_objective = ToF64(c[2]);
    r.ping_pong_ratio = ToF64(c[3]);
    if (!c[4].empty()) r.mean_handover_latency_s = ToF64(c[4]);
    r.system_throughput = ToF64(c[5]);
    r.low_rate_user_ratio = ToF64(c[6]);
    r.total_handover_count = static_cast<int>(ToI64(c[7]));
    r.intra_freq_neighbor_ratio = ToF64(c[8]);
    r.mean_reward = ToF64(c[9]);
    r.ue_distribution_std = ToF64(c[10]);
    r.average_ue_speed = ToF64(c[11]);
    out.push_back(row);
  }
  return out;
}

}  // namespace hexcell
