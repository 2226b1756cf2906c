#include <doctest.h>

#include <fstream>
#include <random>

#include "provsift/whitelist.hpp"
#include "helpers.hpp"

using namespace provsift;
using namespace provsift::testing;

TEST_CASE("prefix matches the destination address") {
    SocketWhitelist wl;
    wl.add_prefix("10.0.0.0/8");
    CHECK(wl.contains(sock_id("172.16.0.1", 999, "10.1.2.3", 443)));
    CHECK_FALSE(wl.contains(sock_id("10.1.2.3", 999, "172.16.0.1", 443)));  // src does not count
}

TEST_CASE("empty whitelist matches nothing") {
    SocketWhitelist wl;
    CHECK_FALSE(wl.contains(sock_id("1.2.3.4", 1, "5.6.7.8", 2)));
}

TEST_CASE("exact entry matches the full key") {
    SocketWhitelist wl;
    wl.add_exact("1.2.3.4:1>5.6.7.8:2");
    CHECK(wl.contains(sock_id("1.2.3.4", 1, "5.6.7.8", 2)));
    CHECK_FALSE(wl.contains(sock_id("1.2.3.4", 1, "5.6.7.8", 3)));
}

TEST_CASE("non-socket entities never match") {
    SocketWhitelist wl;
    wl.add_prefix("0.0.0.0/0");
    CHECK_FALSE(wl.contains(file_id("/etc/passwd")));
}

TEST_CASE("malformed prefixes are rejected") {
    SocketWhitelist wl;
    CHECK_THROWS_AS(wl.add_prefix("10.0.0.0/33"), std::invalid_argument);
    CHECK_THROWS_AS(wl.add_prefix("10.0.0/8"), std::invalid_argument);
    CHECK_THROWS_AS(wl.add_prefix("10.0.0.0"), std::invalid_argument);
}

TEST_CASE("cidr matching agrees with a bit-string oracle") {
    std::mt19937_64 rng(23);
    auto below = [&rng](uint64_t n) { return rng() % n; };
    for (int trial = 0; trial < 2000; ++trial) {
        std::string prefix_ip = std::to_string(below(256)) + "." + std::to_string(below(256)) + "." +
                                std::to_string(below(256)) + "." + std::to_string(below(256));
        int len = static_cast<int>(below(33));
        std::string cidr = prefix_ip + "/" + std::to_string(len);
        std::string dst = std::to_string(below(256)) + "." + std::to_string(below(256)) + "." +
                          std::to_string(below(256)) + "." + std::to_string(below(256));
        SocketWhitelist wl;
        wl.add_prefix(cidr);
        bool expected = ref_cidr_match(dst, cidr);
        CHECK_MESSAGE(wl.contains(sock_id("172.16.9.9", 1234, dst, 443)) == expected,
                      (cidr + " vs " + dst));
    }
}

TEST_CASE("whitelist file loads entries and skips comments") {
    ScopedTempDir dir("wl");
    auto path = dir.path() / "whitelist.txt";
    {
        std::ofstream out(path);
        out << "# mirrors\n";
        out << "10.0.0.0/8\n";
        out << "\n";
        out << "1.2.3.4:1>5.6.7.8:2\n";
    }
    SocketWhitelist wl = SocketWhitelist::load_file(path);
    CHECK(wl.size() == 2);
    CHECK(wl.contains(sock_id("9.9.9.9", 1, "10.255.0.1", 2)));
    CHECK(wl.contains(sock_id("1.2.3.4", 1, "5.6.7.8", 2)));
}
