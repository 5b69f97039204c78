#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "cityplan/errors.hpp"
#include "cityplan/roadnet.hpp"

using namespace cityplan;

namespace {

constexpr double earth_radius_m = 6371008.8;

// latitude offset in degrees that maps to `meters` north of the centroid
double north(double meters) { return meters / earth_radius_m * 180.0 / std::numbers::pi; }

std::string osm(const std::string& body) { return "<?xml version='1.0'?>\n<osm version='0.6'>\n" + body + "</osm>\n"; }

}  // namespace

TEST_CASE("a two-way way of three nodes yields four edges") {
    const auto net = parse_osm_xml(osm(R"(
  <node id="1" lat="45.0" lon="7.0"/>
  <node id="2" lat="45.001" lon="7.0"/>
  <node id="3" lat="45.002" lon="7.001"/>
  <way id="10"><nd ref="1"/><nd ref="2"/><nd ref="3"/><tag k="highway" v="residential"/></way>
)"));
    CHECK(net.node_count() == 3);
    CHECK(net.edge_count() == 4);
    CHECK(net.has_edge(0, 1));
    CHECK(net.has_edge(1, 0));
    CHECK(net.has_edge(1, 2));
    CHECK(net.has_edge(2, 1));
}

TEST_CASE("maxspeed in km/h sets the edge weight") {
    const std::string text = osm("<node id='a' lat='" + std::to_string(45.0 - north(500.0)) +
                                 "' lon='7'/>\n<node id='b' lat='" + std::to_string(45.0 + north(500.0)) +
                                 "' lon='7'/>\n<way id='1'><nd ref='a'/><nd ref='b'/>"
                                 "<tag k='highway' v='primary'/><tag k='maxspeed' v='36'/><tag k='oneway' v='yes'/></way>\n");
    const auto net = parse_osm_xml(text);
    REQUIRE(net.edge_count() == 1);
    // std::to_string keeps 6 decimals (~0.1 m), so compare loosely
    CHECK(net.edge(0).length == doctest::Approx(1000.0).epsilon(1e-3));
    CHECK(net.edge(0).speed == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(net.edge(0).weight == doctest::Approx(100.0).epsilon(1e-3));
}

TEST_CASE("projection is centered on the bounding box") {
    const auto net = parse_osm_xml(osm(R"(
  <node id="1" lat="10.0" lon="20.0"/>
  <node id="2" lat="10.002" lon="20.004"/>
  <way id="5"><nd ref="1"/><nd ref="2"/><tag k="highway" v="tertiary"/></way>
)"));
    const Vec2 a = net.node(0).position, b = net.node(1).position;
    CHECK(a.x == doctest::Approx(-b.x));
    CHECK(a.y == doctest::Approx(-b.y));
    CHECK(b.y == doctest::Approx(earth_radius_m * 0.001 * std::numbers::pi / 180.0));
}

TEST_CASE("oneway handling") {
    const std::string nodes = R"(<node id="1" lat="0" lon="0"/><node id="2" lat="0.001" lon="0"/>)";
    const auto fwd = parse_osm_xml(osm(nodes + R"(<way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="service"/><tag k="oneway" v="yes"/></way>)"));
    REQUIRE(fwd.edge_count() == 1);
    CHECK(fwd.node(fwd.edge(0).source).id == "1");
    const auto rev = parse_osm_xml(osm(nodes + R"(<way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="service"/><tag k="oneway" v="-1"/></way>)"));
    REQUIRE(rev.edge_count() == 1);
    CHECK(rev.node(rev.edge(0).source).id == "2");
}

TEST_CASE("non-drivable ways are filtered") {
    const std::string text = osm(R"(<node id="1" lat="0" lon="0"/><node id="2" lat="0.001" lon="0"/>
<way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="footway"/></way>)");
    CHECK_THROWS_AS(parse_osm_xml(text), NetworkError);
    NetworkConfig cfg;
    cfg.drivable_tags.insert("footway");
    CHECK(parse_osm_xml(text, cfg).edge_count() == 2);
}

TEST_CASE("malformed xml reports a line") {
    try {
        parse_osm_xml("<osm>\n<node id='1' lat='0' lon='0'>\n</osm>");
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_osm_xml("<other/>"), ParseError);
}

TEST_CASE("maxspeed formats") {
    const double fallback = kmh_to_mps(40.0);
    CHECK(parse_maxspeed("50", fallback) == doctest::Approx(kmh_to_mps(50.0)));
    CHECK(parse_maxspeed("30 mph", fallback) == doctest::Approx(kmh_to_mps(30.0 * 1.609)));
    CHECK(parse_maxspeed("60 km/h", fallback) == doctest::Approx(kmh_to_mps(60.0)));
    CHECK(parse_maxspeed("signals", fallback) == fallback);
    CHECK(parse_maxspeed("none", fallback) == fallback);
    CHECK(parse_maxspeed("", fallback) == fallback);
}

TEST_CASE("missing maxspeed uses the default speed") {
    const auto net = parse_osm_xml(osm(R"(<node id="1" lat="0" lon="0"/><node id="2" lat="0.001" lon="0"/>
<way id="1"><nd ref="1"/><nd ref="2"/><tag k="highway" v="primary"/></way>)"));
    CHECK(net.edge(0).speed == doctest::Approx(kmh_to_mps(40.0)));
}
