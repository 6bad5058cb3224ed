#include <fstream>
#include <map>
#include <stdexcept>

#include "hkb/harness.hpp"
#include "json.hpp"

namespace hkb {

using nlohmann::json;

std::string constant_to_json(const CalibratedConstant& c) {
    return "{\"name\":" + json(c.name).dump() + ",\"d\":" + std::to_string(c.d) + ",\"value\":" +
           format_double(c.value) + ",\"grid\":" + json(c.grid).dump() + ",\"timestamp\":" + json(c.timestamp).dump() +
           "}";
}

CalibratedConstant constant_from_json(const std::string& line) {
    const json j = json::parse(line);
    CalibratedConstant c;
    c.name = j.at("name").get<std::string>();
    c.d = j.at("d").get<int>();
    c.value = j.at("value").get<double>();
    c.grid = j.value("grid", std::string{});
    c.timestamp = j.value("timestamp", std::string{});
    return c;
}

void write_constants(const std::string& path, const std::vector<CalibratedConstant>& constants) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write constants file " + path);
    for (const auto& c : constants) out << constant_to_json(c) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<CalibratedConstant> read_constants(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open constants file " + path);
    std::vector<CalibratedConstant> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(constant_from_json(line));
        } catch (const json::exception& e) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

BoundConstants constants_from(const std::vector<CalibratedConstant>& table, int d, double a) {
    std::map<std::string, double> latest;
    for (const auto& c : table)
        if (c.d == d) latest[c.name] = c.value;
    for (const char* name : {"C", "C0", "Ctilde"})
        if (!latest.count(name))
            throw UsageError(std::string("constants file has no ") + name + " for d=" + std::to_string(d));
    return BoundConstants::make(d, latest["C"], latest["C0"], latest["Ctilde"], a);
}

}  // namespace hkb
