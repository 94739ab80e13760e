#pragma once

#include <string>
#include <vector>

#include "radnet/campaign.hpp"

namespace radnet {

/// Shortest representation that round-trips the double exactly.
std::string format_double(double v);

/// CSV with the documented header
///   frame,zeta,pcrlb_trace,crlb_x,crlb_y,crlb_vx,crlb_vy,
///   pd_node1..N,pd_bench_node1..N,accepted,iters
/// Rows are canonically sorted by (zeta, frame); missing benchmark columns
/// are left empty. Byte-stable for a fixed scenario and seed.
std::string records_to_csv(std::vector<FrameRecord> records, int node_count);

/// JSON document nested by zeta; round-trips through records_from_json.
std::string records_to_json(std::vector<FrameRecord> records, int node_count);

std::vector<FrameRecord> records_from_json(const std::string& text);

std::string robustness_to_csv(const std::vector<RobustnessRow>& rows);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace radnet
