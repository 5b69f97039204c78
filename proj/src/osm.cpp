#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "cityplan/errors.hpp"
#include "cityplan/roadnet.hpp"

namespace cityplan {

namespace {

constexpr double earth_radius_m = 6371008.8;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct OsmWay {
    std::vector<std::string> refs;
    std::map<std::string, std::string> tags;
};

}  // namespace

double parse_maxspeed(std::string_view value, double fallback) {
    value = trim(value);
    double factor = 1.0;
    if (value.size() > 3 && value.substr(value.size() - 3) == "mph") {
        value.remove_suffix(3);
        factor = 1.609;
    } else if (value.size() > 4 && value.substr(value.size() - 4) == "km/h") {
        value.remove_suffix(4);
    }
    auto v = parse_number(value);
    if (!v || *v <= 0.0) return fallback;
    return kmh_to_mps(*v * factor);
}

RoadNetwork parse_osm_xml(std::string_view text, const NetworkConfig& cfg) {
    namespace pt = boost::property_tree;
    pt::ptree doc;
    try {
        std::istringstream in{std::string(text)};
        pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("osm: line " + std::to_string(e.line()) + ": " + e.message());
    }
    auto root = doc.get_child_optional("osm");
    if (!root) throw ParseError("osm: missing <osm> root element");

    std::unordered_map<std::string, std::pair<double, double>> latlon;
    std::vector<OsmWay> ways;
    try {
        for (const auto& [name, child] : *root) {
            if (name == "node") {
                const auto& a = child.get_child("<xmlattr>");
                latlon[a.get<std::string>("id")] = {a.get<double>("lat"), a.get<double>("lon")};
            } else if (name == "way") {
                OsmWay w;
                for (const auto& [wname, wchild] : child) {
                    if (wname == "nd") {
                        w.refs.push_back(wchild.get<std::string>("<xmlattr>.ref"));
                    } else if (wname == "tag") {
                        w.tags[wchild.get<std::string>("<xmlattr>.k")] =
                            wchild.get<std::string>("<xmlattr>.v");
                    }
                }
                auto hw = w.tags.find("highway");
                if (hw != w.tags.end() && cfg.drivable_tags.contains(hw->second) && w.refs.size() >= 2)
                    ways.push_back(std::move(w));
            }
        }
    } catch (const pt::ptree_error& e) {
        throw ParseError(std::string("osm: ") + e.what());
    }
    if (ways.empty()) throw NetworkError("osm: no drivable ways in input");

    std::vector<std::string> used;
    std::unordered_map<std::string, bool> seen;
    double min_lat = INFINITY, max_lat = -INFINITY, min_lon = INFINITY, max_lon = -INFINITY;
    for (const auto& w : ways) {
        for (const auto& ref : w.refs) {
            auto it = latlon.find(ref);
            if (it == latlon.end()) throw ParseError("osm: way references missing node " + ref);
            if (seen.emplace(ref, true).second) {
                used.push_back(ref);
                min_lat = std::min(min_lat, it->second.first);
                max_lat = std::max(max_lat, it->second.first);
                min_lon = std::min(min_lon, it->second.second);
                max_lon = std::max(max_lon, it->second.second);
            }
        }
    }
    const double lat0 = 0.5 * (min_lat + max_lat);
    const double lon0 = 0.5 * (min_lon + max_lon);
    constexpr double deg = std::numbers::pi / 180.0;
    const double coslat = std::cos(lat0 * deg);

    RoadNetwork net(cfg.v0);
    for (const auto& id : used) {
        const auto [lat, lon] = latlon.at(id);
        net.add_node(id, {earth_radius_m * (lon - lon0) * deg * coslat, earth_radius_m * (lat - lat0) * deg});
    }
    for (const auto& w : ways) {
        double speed = cfg.default_speed;
        if (auto ms = w.tags.find("maxspeed"); ms != w.tags.end())
            speed = parse_maxspeed(ms->second, cfg.default_speed);
        bool forward = true, backward = true;
        if (auto ow = w.tags.find("oneway"); ow != w.tags.end()) {
            if (ow->second == "yes" || ow->second == "true" || ow->second == "1") backward = false;
            else if (ow->second == "-1") forward = false;
        }
        for (std::size_t i = 1; i < w.refs.size(); ++i) {
            const NodeIndex a = net.index_of(w.refs[i - 1]);
            const NodeIndex b = net.index_of(w.refs[i]);
            if (a == b || net.node(a).position == net.node(b).position) continue;
            if (forward) net.add_edge(a, b, speed);
            if (backward) net.add_edge(b, a, speed);
        }
    }
    return net;
}

}  // namespace cityplan
