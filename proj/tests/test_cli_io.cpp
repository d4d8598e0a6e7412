#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "pilotwave/io.hpp"

using namespace pilotwave;

namespace {

BerCurve small_curve() {
    BerCurve c;
    c.label = "nrz_pt_b2b";
    BerPoint p;
    p.received_power_dbm = -8.0;
    p.errors = 1234;
    p.total_bits = 1'000'000;
    p.ber = 1.234e-3;
    p.low_confidence = false;
    c.points.push_back(p);
    p.received_power_dbm = -6.0;
    p.errors = 12;
    p.total_bits = 1'000'000;
    p.ber = 1.2e-5;
    p.low_confidence = true;
    c.points.push_back(p);
    BerPoint fail;
    fail.received_power_dbm = -4.0;
    fail.failed = true;
    c.points.push_back(fail);
    return c;
}

}  // namespace

TEST_CASE("ber csv schema is stable and timestamps stay in comments") {
    const auto csv = ber_curve_csv(small_curve(), 42, 0xABCD, "2026-01-01T00:00:00Z");
    std::istringstream in(csv);
    std::string line, header;
    std::vector<std::string> comments, rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#')
            comments.push_back(line);
        else if (header.empty())
            header = line;
        else
            rows.push_back(line);
    }
    CHECK(header == "power_dbm,errors,total_bits,ber,low_confidence");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "-8,1234,1000000,0.001234,0");
    CHECK(rows[1] == "-6,12,1000000,1.2e-05,1");
    CHECK(rows[2] == "-4,,,failed,");
    bool seed_found = false, stamp_in_comment = false;
    for (const auto& c : comments) {
        if (c.find("seed=42") != std::string::npos) seed_found = true;
        if (c.find("2026-01-01") != std::string::npos) stamp_in_comment = true;
    }
    CHECK(seed_found);
    CHECK(stamp_in_comment);
    for (const auto& r : rows) CHECK(r.find("2026") == std::string::npos);
}

TEST_CASE("csv body is byte-identical when only the timestamp changes") {
    auto strip_comments = [](const std::string& csv) {
        std::istringstream in(csv);
        std::string line, body;
        while (std::getline(in, line))
            if (line.empty() || line[0] != '#') body += line + "\n";
        return body;
    };
    const auto a = ber_curve_csv(small_curve(), 42, 1, "ts-one");
    const auto b = ber_curve_csv(small_curve(), 42, 1, "ts-two");
    CHECK(a != b);
    CHECK(strip_comments(a) == strip_comments(b));
}

TEST_CASE("eye pgm is a valid P5 with log-scaled peak at 255") {
    EyeHistogram eye;
    eye.ui = 40e-12;
    eye.amp_min = 0.0;
    eye.amp_max = 1.0;
    eye.grid.assign(32, std::vector<std::size_t>(32, 0));
    eye.grid[3][4] = 1000;  // peak
    eye.grid[10][10] = 10;
    eye.total = 1010;

    const auto pgm = eye_pgm(eye);
    CHECK(pgm.substr(0, 3) == "P5\n");
    CHECK(pgm.find("32 32\n255\n") != std::string::npos);
    const std::size_t header_end = pgm.find("255\n") + 4;
    REQUIRE(pgm.size() == header_end + 32 * 32);
    // rows are flipped: grid row 3 (low amplitude) is image row 28
    const auto peak_px = static_cast<unsigned char>(pgm[header_end + 28 * 32 + 4]);
    CHECK(peak_px == 255);
    const auto bg_px = static_cast<unsigned char>(pgm[header_end]);
    CHECK(bg_px == 0);
}

TEST_CASE("fnv1a fingerprint is stable") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") != fnv1a("b"));
    CHECK(fnv1a("pilotwave") == fnv1a("pilotwave"));
}
