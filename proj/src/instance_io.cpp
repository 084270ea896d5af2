#include "enstrect/instance_io.hpp"

#include <algorithm>
#include <fstream>

#include "enstrect/error.hpp"

namespace enstrect {

using nlohmann::json;

namespace {

json vertices_to_json(const std::vector<Eigen::Vector3d>& verts) {
  json arr = json::array();
  for (const auto& v : verts) arr.push_back({v.x(), v.y(), v.z()});
  return arr;
}

std::vector<Eigen::Vector3d> vertices_from_json(const json& arr) {
  std::vector<Eigen::Vector3d> verts;
  verts.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_array() || v.size() != 3)
      throw ValidationError("instances: vertex must hold 3 coordinates");
    verts.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }
  return verts;
}

}  // namespace

void InstanceRecord::validate() const {
  if (kind == "medial_axis") {
    for (const auto& line : polylines)
      if (line.size() < 2)
        throw ValidationError("instances: medial-axis polyline needs at least 2 vertices");
    if (polylines.empty())
      throw ValidationError("instances: medial-axis record without polylines");
  } else if (kind == "polygon") {
    if (loop.size() < 3)
      throw ValidationError("instances: polygon needs at least 3 vertices");
  } else {
    throw ValidationError("instances: unknown geometry kind '" + kind + "'");
  }
  if (class_name.empty()) throw ValidationError("instances: empty class name");
}

void write_instances_json(const std::vector<InstanceRecord>& records, const std::string& path) {
  for (const auto& r : records) r.validate();
  json doc;
  doc["schema_version"] = kInstanceSchemaVersion;
  json arr = json::array();
  for (const auto& r : records) {
    json item;
    item["id"] = r.id;
    item["class"] = r.class_name;
    item["kind"] = r.kind;
    item["confidence"] = r.confidence;
    if (r.kind == "medial_axis") {
      json lines = json::array();
      for (const auto& line : r.polylines) lines.push_back(vertices_to_json(line));
      item["polylines"] = lines;
    } else {
      item["loop"] = vertices_to_json(r.loop);
      if (!r.aux_loops.empty()) {
        json aux = json::array();
        for (const auto& l : r.aux_loops) aux.push_back(vertices_to_json(l));
        item["aux_loops"] = aux;
      }
      item["planar"] = r.planar;
      item["alpha"] = r.alpha;
    }
    if (!r.provenance.is_null()) item["provenance"] = r.provenance;
    arr.push_back(item);
  }
  doc["instances"] = arr;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw ProcessingError("instances: write failed for '" + path + "'");
}

std::vector<InstanceRecord> read_instances_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("instances '" + path + "': invalid JSON: " + e.what());
  }
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
    throw ValidationError("instances '" + path + "': missing schema_version");
  if (doc["schema_version"].get<int>() != kInstanceSchemaVersion)
    throw ValidationError("instances '" + path + "': unsupported schema_version " +
                          doc["schema_version"].dump());

  std::vector<InstanceRecord> records;
  for (const auto& item : doc.value("instances", json::array())) {
    InstanceRecord r;
    try {
      r.id = item.at("id").get<int>();
      r.class_name = item.at("class").get<std::string>();
      r.kind = item.at("kind").get<std::string>();
      r.confidence = item.value("confidence", 1.0);
      if (item.contains("polylines"))
        for (const auto& line : item["polylines"]) r.polylines.push_back(vertices_from_json(line));
      if (item.contains("loop")) r.loop = vertices_from_json(item["loop"]);
      if (item.contains("aux_loops"))
        for (const auto& l : item["aux_loops"]) r.aux_loops.push_back(vertices_from_json(l));
      r.planar = item.value("planar", true);
      r.alpha = item.value("alpha", 0.0);
      if (item.contains("provenance")) r.provenance = item["provenance"];
    } catch (const json::exception& e) {
      throw ValidationError("instances '" + path + "': malformed record (" +
                            std::string(e.what()) + ")");
    }
    r.validate();
    records.push_back(std::move(r));
  }
  return records;
}

void write_instances_obj(const std::vector<InstanceRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << "# damage instances\n";
  long long base = 1;
  auto emit = [&](const std::vector<Eigen::Vector3d>& verts, bool closed,
                  const std::string& tag) {
    out << "g " << tag << "\n";
    char buf[96];
    for (const auto& v : verts) {
      std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
      out << buf;
    }
    out << "l";
    for (std::size_t i = 0; i < verts.size(); ++i) out << " " << base + static_cast<long long>(i);
    if (closed) out << " " << base;
    out << "\n";
    base += static_cast<long long>(verts.size());
  };
  for (const auto& r : records) {
    if (r.kind == "medial_axis") {
      int part = 0;
      for (const auto& line : r.polylines)
        emit(line, false,
             r.class_name + "_" + std::to_string(r.id) + "_" + std::to_string(part++));
    } else {
      emit(r.loop, true, r.class_name + "_" + std::to_string(r.id));
      int part = 0;
      for (const auto& aux : r.aux_loops)
        emit(aux, true,
             r.class_name + "_" + std::to_string(r.id) + "_aux" + std::to_string(part++));
    }
  }
  if (!out) throw ProcessingError("obj: write failed for '" + path + "'");
}

std::vector<EvalInstance> to_eval_instances(const std::vector<InstanceRecord>& records,
                                            const std::vector<std::string>& class_names) {
  std::vector<EvalInstance> out;
  for (const auto& r : records) {
    const auto it = std::find(class_names.begin(), class_names.end(), r.class_name);
    EvalInstance inst;
    inst.class_index = it == class_names.end() ? -1 : static_cast<int>(it - class_names.begin());
    inst.confidence = r.confidence;
    if (r.kind == "medial_axis") {
      for (const auto& line : r.polylines) inst.parts.push_back({false, line});
    } else {
      inst.parts.push_back({true, r.loop});
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace enstrect
