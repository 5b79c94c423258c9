#pragma once
// JSON-lines interchange for labelled and predicted boxes:
// {"frame": 12, "boxes": [{"class": "marker1", "corners": [[u,v],...], "confidence": 0.9}]}

#include <mscr/perception.hpp>

#include <json.hpp>

#include <istream>
#include <ostream>

namespace mscr::perception {

inline nlohmann::json to_json(const BoundingBox& b) {
  nlohmann::json corners = nlohmann::json::array();
  for (const auto& c : b.corners) corners.push_back({c.x(), c.y()});
  return {{"class", std::string(class_name(b.cls))}, {"corners", corners}, {"confidence", b.confidence}};
}

inline BoundingBox box_from_json(const nlohmann::json& j) {
  BoundingBox b;
  b.cls = class_from_name(j.at("class").get<std::string>());
  const auto& corners = j.at("corners");
  if (!corners.is_array() || corners.size() != 4) throw DomainError("box needs exactly four corners");
  for (std::size_t i = 0; i < 4; ++i) {
    b.corners[i] = Vec2(corners[i].at(0).get<double>(), corners[i].at(1).get<double>());
  }
  b.confidence = j.value("confidence", 1.0);
  b.validate();
  return b;
}

inline nlohmann::json to_json(const Frame& f) {
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto& b : f.boxes) boxes.push_back(to_json(b));
  return {{"frame", f.index}, {"boxes", boxes}};
}

inline Frame frame_from_json(const nlohmann::json& j) {
  Frame f;
  f.index = j.at("frame").get<long>();
  for (const auto& b : j.at("boxes")) f.boxes.push_back(box_from_json(b));
  return f;
}

inline std::vector<Frame> read_frames(std::istream& in) {
  std::vector<Frame> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(frame_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw DomainError("detections line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline void write_frames(std::ostream& out, const std::vector<Frame>& frames) {
  for (const auto& f : frames) out << to_json(f).dump() << '\n';
}

}  // namespace mscr::perception
