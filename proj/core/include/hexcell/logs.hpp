#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hexcell/env.hpp"
#include "hexcell/metrics.hpp"

namespace hexcell {

// One evaluated or trained episode as persisted in a run directory.
struct EpisodeRecord {
  int64_t episode = 0;
  uint64_t seed = 0;
  EpisodeLog log;
  EpisodeReport report;
};

std::string EpisodesToJson(const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> EpisodesFromJson(const std::string& text);

struct EventRow {
  int64_t episode = 0;
  HandoverEvent event;
  friend bool operator==(const EventRow&, const EventRow&) = default;
};

struct LoadRow {
  int64_t episode = 0;
  int slot = 0;
  int cell = 0;
  double load = 0.0;
  double estimate = 0.0;
  double reward = 0.0;
  double exact_reward = 0.0;
  double gamma = 0.0;
  friend bool operator==(const LoadRow&, const LoadRow&) = default;
};

struct RateRow {
  int64_t episode = 0;
  int slot = 0;
  int ue = 0;
  int serving = 0;
  double rate_bps = 0.0;
  double request_bytes = 0.0;
  friend bool operator==(const RateRow&, const RateRow&) = default;
};

struct ReportRow {
  int64_t episode = 0;
  uint64_t seed = 0;
  EpisodeReport report;
};

std::vector<EventRow> FlattenEvents(const std::vector<EpisodeRecord>& records);
std::vector<LoadRow> FlattenLoads(const std::vector<EpisodeRecord>& records);
std::vector<RateRow> FlattenRates(const std::vector<EpisodeRecord>& records);
std::vector<ReportRow> FlattenReports(const std::vector<EpisodeRecord>& records);

// Stable column order; doubles printed with 17 significant digits so that
// re-import is exact. Readers throw std::runtime_error on malformed input.
std::string ToCsv(const std::vector<EventRow>& rows);
std::string ToCsv(const std::vector<LoadRow>& rows);
std::string ToCsv(const std::vector<RateRow>& rows);
std::string ToCsv(const std::vector<ReportRow>& rows);
std::string ToJson(const std::vector<EventRow>& rows);
std::string ToJson(const std::vector<LoadRow>& rows);
std::string ToJson(const std::vector<RateRow>& rows);
std::string ToJson(const std::vector<ReportRow>& rows);

std::vector<EventRow> EventsFromCsv(const std::string& text);
std::vector<EventRow> EventsFromJson(const std::string& text);
std::vector<LoadRow> LoadsFromCsv(const std::string& text);
std::vector<LoadRow> LoadsFromJson(const std::string& text);
std::vector<RateRow> RatesFromCsv(const std::string& text);
std::vector<ReportRow> ReportsFromCsv(const std::string& text);

std::string FormatDouble(double v);

}  // namespace hexcell
