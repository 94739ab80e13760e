#include "radnet/emit.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace radnet {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void sort_canonically(std::vector<FrameRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const FrameRecord& a, const FrameRecord& b) {
    if (a.zeta != b.zeta) return a.zeta < b.zeta;
    return a.frame < b.frame;
  });
}

}  // namespace

std::string records_to_csv(std::vector<FrameRecord> records, int node_count) {
  sort_canonically(records);
  std::ostringstream out;
  out << "frame,zeta,pcrlb_trace,crlb_x,crlb_y,crlb_vx,crlb_vy";
  for (int n = 1; n <= node_count; ++n) out << ",pd_node" << n;
  for (int n = 1; n <= node_count; ++n) out << ",pd_bench_node" << n;
  out << ",accepted,iters\n";
  for (const auto& rec : records) {
    out << rec.frame << ',' << format_double(rec.zeta) << ',' << format_double(rec.pcrlb_trace)
        << ',' << format_double(rec.crlb_x) << ',' << format_double(rec.crlb_y) << ','
        << format_double(rec.crlb_vx) << ',' << format_double(rec.crlb_vy);
    for (int n = 0; n < node_count; ++n)
      out << ',' << (n < static_cast<int>(rec.pd.size()) ? format_double(rec.pd[n]) : "");
    for (int n = 0; n < node_count; ++n)
      out << ','
          << (n < static_cast<int>(rec.pd_bench.size()) ? format_double(rec.pd_bench[n]) : "");
    out << ',' << (rec.accepted ? 1 : 0) << ',' << rec.iters << '\n';
  }
  return out.str();
}

namespace {

json record_to_json(const FrameRecord& rec) {
  json j;
  j["frame"] = rec.frame;
  j["pcrlb_trace"] = rec.pcrlb_trace;
  j["crlb_x"] = rec.crlb_x;
  j["crlb_y"] = rec.crlb_y;
  j["crlb_vx"] = rec.crlb_vx;
  j["crlb_vy"] = rec.crlb_vy;
  j["pd"] = rec.pd;
  j["pd_bench"] = rec.pd_bench;
  j["accepted"] = rec.accepted;
  j["iters"] = rec.iters;
  return j;
}

FrameRecord record_from_json(const json& j, double zeta) {
  FrameRecord rec;
  rec.frame = j.at("frame").get<int>();
  rec.zeta = zeta;
  rec.pcrlb_trace = j.at("pcrlb_trace").get<double>();
  rec.crlb_x = j.at("crlb_x").get<double>();
  rec.crlb_y = j.at("crlb_y").get<double>();
  rec.crlb_vx = j.at("crlb_vx").get<double>();
  rec.crlb_vy = j.at("crlb_vy").get<double>();
  rec.pd = j.at("pd").get<std::vector<double>>();
  rec.pd_bench = j.at("pd_bench").get<std::vector<double>>();
  rec.accepted = j.at("accepted").get<bool>();
  rec.iters = j.at("iters").get<int>();
  return rec;
}

}  // namespace

std::string records_to_json(std::vector<FrameRecord> records, int node_count) {
  sort_canonically(records);
  json doc;
  doc["schema_version"] = 1;
  doc["node_count"] = node_count;
  doc["zetas"] = json::object();
  for (const auto& rec : records) {
    const std::string key = format_double(rec.zeta);
    if (!doc["zetas"].contains(key)) doc["zetas"][key] = json::array();
    doc["zetas"][key].push_back(record_to_json(rec));
  }
  return doc.dump(2) + "\n";
}

std::vector<FrameRecord> records_from_json(const std::string& text) {
  const json doc = json::parse(text);
  std::vector<FrameRecord> records;
  for (const auto& [key, rows] : doc.at("zetas").items()) {
    const double zeta = std::stod(key);
    for (const auto& row : rows) records.push_back(record_from_json(row, zeta));
  }
  sort_canonically(records);
  return records;
}

std::string robustness_to_csv(const std::vector<RobustnessRow>& rows) {
  std::ostringstream out;
  out << "frame,zeta,pcrlb_mean,pcrlb_min,pcrlb_max,pcrlb_reference\n";
  for (const auto& row : rows) {
    out << row.frame << ',' << format_double(row.zeta) << ',' << format_double(row.pcrlb_mean)
        << ',' << format_double(row.pcrlb_min) << ',' << format_double(row.pcrlb_max) << ','
        << format_double(row.pcrlb_reference) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace radnet
