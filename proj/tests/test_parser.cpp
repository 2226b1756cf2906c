#include <doctest.h>

#include <random>

#include <json.hpp>

#include "provsift/parser.hpp"
#include "helpers.hpp"

using namespace provsift;
using namespace provsift::testing;

TEST_CASE("canonical record parses and copies fields") {
    ParsedLine p = parse_event_line(
        R"({"ts":1000000000,"op":"recvfrom","subj":{"kind":"socket","sip":"10.0.0.2","sport":443,"dip":"192.168.2.3","dport":51820},"obj":{"kind":"process","name":"bash","pid":4821},"bytes":526})");
    REQUIRE(p.status == LineStatus::Ok);
    CHECK(p.event.op == Op::Recvfrom);
    CHECK(p.event.ti == 1'000'000'000);
    CHECK(p.event.bytes == 526);
    CHECK(p.event.subject.key == "10.0.0.2:443>192.168.2.3:51820");
    CHECK(p.event.object.key == "bash#4821");
    CHECK(p.event.eid == 0);  // the sequencer assigns it
}

TEST_CASE("kind mismatch is a semantic error naming the rule") {
    ParsedLine p = parse_event_line(
        R"({"ts":1,"op":"read","subj":{"kind":"socket","sip":"10.0.0.2","sport":443,"dip":"1.2.3.4","dport":80},"obj":{"kind":"process","name":"x","pid":1},"bytes":0})");
    CHECK(p.status == LineStatus::SemanticError);
    CHECK(p.error.find("kind mismatch") != std::string::npos);
    CHECK(p.error.find("file->process") != std::string::npos);
}

TEST_CASE("blank lines are counted, not errors") {
    CHECK(parse_event_line("").status == LineStatus::Blank);
    CHECK(parse_event_line("   \t ").status == LineStatus::Blank);
}

TEST_CASE("unsupported ops are skipped") {
    ParsedLine p = parse_event_line(
        R"({"ts":1,"op":"mmap","subj":{"kind":"file","path":"/a"},"obj":{"kind":"process","name":"x","pid":1},"bytes":0})");
    CHECK(p.status == LineStatus::SkippedUnsupported);
}

TEST_CASE("readv and writev fold into read and write") {
    ParsedLine p = parse_event_line(
        R"({"ts":1,"op":"readv","subj":{"kind":"file","path":"/a"},"obj":{"kind":"process","name":"x","pid":1},"bytes":77})");
    REQUIRE(p.status == LineStatus::Ok);
    CHECK(p.event.op == Op::Read);
}

TEST_CASE("syntax errors carry a byte offset") {
    ParsedLine p = parse_event_line(R"({"ts":1,"op")");
    CHECK(p.status == LineStatus::SyntaxError);
    CHECK(p.error_offset > 0);

    ParsedLine q = parse_event_line(R"({"ts":"soon","op":"read","subj":{},"obj":{},"bytes":0})");
    CHECK(q.status == LineStatus::SyntaxError);  // schema violation
}

TEST_CASE("field-order-free parsing matches the fast path") {
    std::string canonical =
        R"({"ts":42,"op":"write","subj":{"kind":"process","name":"tar","pid":9},"obj":{"kind":"file","path":"/tmp/x"},"bytes":1024})";
    std::string reordered =
        R"({"bytes":1024, "obj":{"path":"/tmp/x","kind":"file"}, "op":"write", "subj":{"pid":9,"kind":"process","name":"tar"}, "ts":42})";
    ParsedLine a = parse_event_line(canonical);
    ParsedLine b = parse_event_line(reordered);
    REQUIRE(a.status == LineStatus::Ok);
    REQUIRE(b.status == LineStatus::Ok);
    CHECK(a.event == b.event);
}

TEST_CASE("descriptor validation surfaces in parse results") {
    ParsedLine p = parse_event_line(
        R"({"ts":1,"op":"read","subj":{"kind":"file","path":"relative/path"},"obj":{"kind":"process","name":"x","pid":1},"bytes":0})");
    CHECK(p.status == LineStatus::SemanticError);
    CHECK(p.error.find("path") != std::string::npos);

    ParsedLine q = parse_event_line(
        R"({"ts":-5,"op":"read","subj":{"kind":"file","path":"/a"},"obj":{"kind":"process","name":"x","pid":1},"bytes":0})");
    CHECK(q.status == LineStatus::SemanticError);
    CHECK(q.error.find("ts") != std::string::npos);
}

TEST_CASE("round trip: serialize(parse(x)) is the canonical form") {
    std::mt19937_64 rng(11);
    auto below = [&rng](uint64_t n) { return rng() % n; };
    for (int i = 0; i < 500; ++i) {
        Event e;
        switch (below(6)) {
            case 0:
                e = make_event(Op::Recvfrom, sock_id("10.0.0.1", 1, "2.3.4.5", 2),
                               proc_id("p q", 7), 123, 5);
                break;
            case 1:
                e = make_event(Op::Sendto, proc_id("x\"y", 3), sock_id("9.9.9.9", 80, "1.1.1.1", 443),
                               456, 9);
                break;
            case 2:
                e = make_event(Op::Read, file_id("/path/with \"quotes\"\n"), proc_id("p", 1), 1, 2);
                break;
            case 3:
                e = make_event(Op::Write, proc_id("tab\tname", 2), file_id("/a/b"), 2, 3);
                break;
            case 4:
                e = make_event(Op::Execve, proc_id("a", static_cast<int64_t>(below(100000))),
                               proc_id("b", static_cast<int64_t>(below(100000))),
                               static_cast<int64_t>(below(1'000'000'000'000)), below(1'000'000));
                break;
            default:
                e = make_event(Op::Clone, proc_id("c#d", 1), proc_id("e", 2), 99, 0);
                break;
        }
        std::string line = serialize_event(e);
        ParsedLine parsed = parse_event_line(line);
        REQUIRE_MESSAGE(parsed.status == LineStatus::Ok, (line + " -> " + parsed.error));
        CHECK(parsed.event == e);
        CHECK(serialize_event(parsed.event) == line);

        // any JSON re-rendering of the same record parses to the same event
        nlohmann::json j = nlohmann::json::parse(line);
        ParsedLine reparsed = parse_event_line(j.dump());
        REQUIRE(reparsed.status == LineStatus::Ok);
        CHECK(reparsed.event == e);
    }
}

TEST_CASE("parse counters tally statuses") {
    ParseCounters counters;
    counters.add(LineStatus::Ok);
    counters.add(LineStatus::Blank);
    counters.add(LineStatus::Ok);
    counters.add(LineStatus::SyntaxError);
    CHECK(counters.ok == 2);
    CHECK(counters.blank == 1);
    CHECK(counters.syntax_errors == 1);
    CHECK(counters.total() == 4);
}
