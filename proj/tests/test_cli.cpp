#include <doctest.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tsui/cli.hpp"

using doctest::Approx;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = tsui::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scenario(const std::string& name, const json& body) {
    const fs::path p = fs::temp_directory_path() / ("tsui_cli_" + name + ".json");
    std::ofstream(p) << body.dump();
    return p;
}

Outcome run_with(const std::string& cmd, const json& body, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{cmd, "--config", scenario(cmd, body).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

double num(const std::string& s) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    REQUIRE(res.ec == std::errc());
    return v;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    FAIL("missing column " << name);
    return 0;
}

}  // namespace

TEST_CASE("sensitivity") {
    const Outcome o = run({"sensitivity"});
    REQUIRE(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j["variance_times_alpha2"].get<double>() == Approx(0.0952).epsilon(1e-3));
    CHECK(j["closed_form_times_alpha2"].get<double>() == Approx(j["variance_times_alpha2"].get<double>()).epsilon(1e-9));

    const Outcome bad = run_with("sensitivity", {{"phi_p", 0.0}});
    CHECK(bad.code == 3);
    CHECK(bad.err.find("phi_p") != std::string::npos);

    const json lossless = {{"eta", 1.0}, {"gain", 2.0}};
    json vi = lossless, vv = lossless;
    vi["scheme"] = "i";
    vv["scheme"] = "v";
    const json ji = json::parse(run_with("sensitivity", vi).out);
    const json jv = json::parse(run_with("sensitivity", vv).out);
    CHECK(ji["variance_times_alpha2"].get<double>() == Approx(jv["variance_times_alpha2"].get<double>()).epsilon(1e-10));
    CHECK(jv["variance_times_alpha2"].get<double>() == Approx(0.042893).epsilon(1e-5));
}

TEST_CASE("figure tables") {
    SUBCASE("figure2 at unit gain") {
        const Outcome o = run_with("figure2", {{"gains", {1.0, 2.0}}});
        REQUIRE(o.code == 0);
        const auto rows = parse_csv(o.out);
        REQUIRE(rows.size() == 3);
        const auto& h = rows[0];
        for (const char* c : {"i_closed", "i_numeric", "v_closed", "v_numeric"}) {
            CHECK(num(rows[1][column(h, c)]) == Approx(0.5).epsilon(1e-9));
        }
        // no conjugate signal without gain
        for (const char* c : {"ii_numeric", "iii_numeric", "iv_numeric"}) CHECK(rows[1][column(h, c)].empty());
        CHECK(num(rows[2][column(h, "v_closed")]) == Approx(0.042893).epsilon(1e-5));
        CHECK(num(rows[2][column(h, "iv_closed")]) == Approx(0.4455).epsilon(1e-4));
    }
    SUBCASE("fig4b peak") {
        const Outcome o = run({"fig4b"});
        REQUIRE(o.code == 0);
        const auto rows = parse_csv(o.out);
        REQUIRE(rows.size() == 362);
        std::size_t best = 1;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            if (rows[k][1].empty()) continue;
            if (rows[best][1].empty() || num(rows[k][1]) > num(rows[best][1])) best = k;
        }
        CHECK(num(rows[best][0]) == Approx(kPi / 2).epsilon(1e-9));
        CHECK(std::abs(num(rows[best][1]) - 3.9) < 0.1);
        CHECK(std::abs(num(rows[best][2]) - num(rows[best][1])) < 0.05);
    }
    SUBCASE("figs2 maximum") {
        const Outcome o = run_with("figs2", {{"r", 0.4605}}, {"--format", "json"});
        REQUIRE(o.code == 0);
        const json j = json::parse(o.out);
        CHECK(std::abs(j["peak_snri_db"].get<double>() - 4.0) < 0.05);
        CHECK(j["peak_phi_p"].get<double>() == Approx(kPi / 2));
    }
}

TEST_CASE("oracle and experiment commands") {
    const Outcome o = run_with("oracle-check", {{"r", {0.1, 0.3}}, {"alpha", {0.5}}});
    REQUIRE(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j["status"] == "pass");
    CHECK(j["max_discrepancy"].get<double>() < 1e-6);

    const json mc = {{"seed", 11}, {"duration_s", 0.05}};
    const Outcome a = run_with("mc-experiment", mc);
    const Outcome b = run_with("mc-experiment", mc);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const json ja = json::parse(a.out);
    CHECK(std::abs(ja["coherent"]["estimated_snr_db"].get<double>() - 22.5) <= 2.0);
    CHECK(ja["seed"] == 11);
    const Outcome c = run_with("mc-experiment", mc, {"--seed", "12"});
    CHECK(json::parse(c.out)["seed"] == 12);
    CHECK(c.out != a.out);

    const Outcome warn = run_with("mc-experiment", {{"delta_phi", 0.08}, {"duration_s", 0.01}});
    CHECK(warn.code == 0);
    CHECK(warn.err.find("warning") != std::string::npos);

    const json cal = json::parse(run({"calibrate-sql"}).out);
    CHECK(cal["detected_photons"].get<double>() == Approx(8.52e7).epsilon(1e-3));
    CHECK(std::abs(cal["difference_db"].get<double>()) <= 2.0);
}

TEST_CASE("fisher command") {
    const Outcome o = run_with("fisher", {{"eta", 1.0}, {"gain", 2.0}});
    REQUIRE(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j["cfi"].get<double>() <= j["qfi"].get<double>());
    CHECK(j["inverse_phase_variance"].get<double>() <= j["cfi"].get<double>() * (1 + 1e-9));
    CHECK(run_with("fisher", {{"scheme", "iii"}}).code == 2);
}

TEST_CASE("input validation") {
    CHECK(run_with("sensitivity", {{"etta", 0.5}}).code == 2);
    CHECK(run_with("sensitivity", {{"eta", 1.5}}).code == 2);
    CHECK(run_with("sensitivity", {{"gain", 2.0}, {"r", 0.3}}).code == 2);
    CHECK(run({"sensitivity", "--format", "xml"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"sensitivity", "--config", "/nonexistent/x.json"}).code != 0);
    CHECK(run_with("figure2", {{"gains", {2.0}}, {"points", 3}}).code == 2);

    ::setenv("TSUI_THREADS", "zero", 1);
    CHECK(run({"calibrate-sql"}).code == 2);
    ::setenv("TSUI_THREADS", "1", 1);
    CHECK(run({"calibrate-sql"}).code == 0);
    ::unsetenv("TSUI_THREADS");
}

TEST_CASE("output options") {
    const fs::path out = fs::temp_directory_path() / "tsui_cli_out.csv";
    fs::remove(out);
    const Outcome o = run_with("calibrate-sql", {{"format", "csv"}, {"out", out.string()}});
    REQUIRE(o.code == 0);
    CHECK(o.out.empty());
    REQUIRE(fs::exists(out));
    std::ifstream is(out);
    const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(text.find("detected_photons") != std::string::npos);
    fs::remove(out);

    const Outcome j = run_with("calibrate-sql", {{"format", "csv"}}, {"--format", "json"});
    CHECK(json::parse(j.out).contains("predicted_snr_db"));
}

TEST_CASE("CSV round trip") {
    const Outcome csv = run_with("figure2", {{"points", 9}});
    const Outcome js = run_with("figure2", {{"points", 9}}, {"--format", "json"});
    REQUIRE(csv.code == 0);
    REQUIRE(js.code == 0);
    const auto rows = parse_csv(csv.out);
    const json table = json::parse(js.out);
    REQUIRE(table.size() + 1 == rows.size());
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const json& row = table[k - 1];
        for (std::size_t c = 0; c < rows[0].size(); ++c) {
            const json& cell = row[rows[0][c]];
            if (rows[k][c].empty()) {
                CHECK(cell.is_null());
                continue;
            }
            const double v = num(rows[k][c]);
            CHECK(v == cell.get<double>());
            CHECK(tsui::cli::format_number(v) == rows[k][c]);
        }
    }
    CHECK(tsui::cli::format_number(0.1) == "0.10000000000000001");
    CHECK(num(tsui::cli::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
