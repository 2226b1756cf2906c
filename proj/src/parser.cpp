#include "provsift/parser.hpp"

#include <charconv>
#include <stdexcept>

#include <json.hpp>

namespace provsift {

namespace {

// A record after field extraction, before semantic validation.
struct RawRecord {
    int64_t ts = 0;
    std::string op;
    RawDescriptor subj;
    RawDescriptor obj;
    uint64_t bytes = 0;
};

ParsedLine finish(RawRecord&& raw) {
    ParsedLine out;
    std::string_view op_name = raw.op;
    if (op_name == "readv") op_name = "read";
    if (op_name == "writev") op_name = "write";
    auto op = op_from_string(op_name);
    if (!op) {
        out.status = LineStatus::SkippedUnsupported;
        out.error = "unsupported op '" + raw.op + "'";
        return out;
    }
    if (raw.ts < 0) {
        out.status = LineStatus::SemanticError;
        out.error = "ts must be non-negative";
        return out;
    }
    EntityId subject, object;
    try {
        subject = canonicalize(raw.subj);
        object = canonicalize(raw.obj);
    } catch (const std::invalid_argument& e) {
        out.status = LineStatus::SemanticError;
        out.error = e.what();
        return out;
    }
    const TransferRule* rule = find_rule(*op, subject.kind, object.kind);
    if (rule == nullptr) {
        out.status = LineStatus::SemanticError;
        out.error = std::string("kind mismatch: op '") + to_string(*op) + "' requires " +
                    to_string(expected_subject_kind(*op)) + "->" + to_string(expected_object_kind(*op)) +
                    " (" + find_rule(*op, expected_subject_kind(*op), expected_object_kind(*op))->description +
                    "); got " + to_string(subject.kind) + "->" + to_string(object.kind);
        return out;
    }
    out.status = LineStatus::Ok;
    out.event.subject = std::move(subject);
    out.event.object = std::move(object);
    out.event.op = *op;
    out.event.ti = raw.ts;
    out.event.bytes = raw.bytes;
    return out;
}

// ---- fast path: exact canonical layout as produced by serialize_event ----

struct Cursor {
    const char* p;
    const char* end;

    bool lit(std::string_view s) {
        if (static_cast<size_t>(end - p) < s.size()) return false;
        if (std::string_view(p, s.size()) != s) return false;
        p += s.size();
        return true;
    }
    bool u64(uint64_t& out) {
        auto [ptr, ec] = std::from_chars(p, end, out);
        if (ec != std::errc{} || ptr == p) return false;
        p = ptr;
        return true;
    }
    bool i64(int64_t& out) {
        auto [ptr, ec] = std::from_chars(p, end, out);
        if (ec != std::errc{} || ptr == p) return false;
        p = ptr;
        return true;
    }
    // JSON string body after the opening quote; false on any escape so the
    // slow path handles decoding.
    bool plain_string(std::string& out) {
        const char* start = p;
        while (p < end && *p != '"' && *p != '\\') {
            if (static_cast<unsigned char>(*p) < 0x20) return false;
            ++p;
        }
        if (p >= end || *p != '"') return false;
        out.assign(start, p);
        ++p;
        return true;
    }
};

bool fast_descriptor(Cursor& c, RawDescriptor& out) {
    if (!c.lit("{\"kind\":\"")) return false;
    if (c.lit("file\",\"path\":\"")) {
        FileDescriptor f;
        if (!c.plain_string(f.path)) return false;
        if (!c.lit("}")) return false;
        out = std::move(f);
        return true;
    }
    if (c.lit("process\",\"name\":\"")) {
        ProcessDescriptor pd;
        if (!c.plain_string(pd.name)) return false;
        if (!c.lit(",\"pid\":")) return false;
        if (!c.i64(pd.pid)) return false;
        if (!c.lit("}")) return false;
        out = std::move(pd);
        return true;
    }
    if (c.lit("socket\",\"sip\":\"")) {
        SocketDescriptor sd;
        if (!c.plain_string(sd.src_ip)) return false;
        if (!c.lit(",\"sport\":")) return false;
        if (!c.i64(sd.src_port)) return false;
        if (!c.lit(",\"dip\":\"")) return false;
        if (!c.plain_string(sd.dst_ip)) return false;
        if (!c.lit(",\"dport\":")) return false;
        if (!c.i64(sd.dst_port)) return false;
        if (!c.lit("}")) return false;
        out = std::move(sd);
        return true;
    }
    return false;
}

bool fast_parse(std::string_view line, RawRecord& raw) {
    Cursor c{line.data(), line.data() + line.size()};
    if (!c.lit("{\"ts\":")) return false;
    if (!c.i64(raw.ts)) return false;
    if (!c.lit(",\"op\":\"")) return false;
    if (!c.plain_string(raw.op)) return false;
    if (!c.lit(",\"subj\":")) return false;
    if (!fast_descriptor(c, raw.subj)) return false;
    if (!c.lit(",\"obj\":")) return false;
    if (!fast_descriptor(c, raw.obj)) return false;
    if (!c.lit(",\"bytes\":")) return false;
    if (!c.u64(raw.bytes)) return false;
    if (!c.lit("}")) return false;
    return c.p == c.end;
}

// ---- slow path: any-order JSON via nlohmann ----

using json = nlohmann::json;

ParsedLine schema_error(std::string msg) {
    ParsedLine out;
    out.status = LineStatus::SyntaxError;
    out.error = std::move(msg);
    return out;
}

bool get_string(const json& j, const char* field, std::string& out) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string()) return false;
    out = it->get<std::string>();
    return true;
}

bool get_int(const json& j, const char* field, int64_t& out) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_number_integer()) return false;
    out = it->get<int64_t>();
    return true;
}

bool slow_descriptor(const json& j, const char* which, RawDescriptor& out, std::string& err) {
    if (!j.is_object()) {
        err = std::string(which) + " must be an object";
        return false;
    }
    std::string kind;
    if (!get_string(j, "kind", kind)) {
        err = std::string(which) + ".kind must be a string";
        return false;
    }
    if (kind == "file") {
        FileDescriptor f;
        if (!get_string(j, "path", f.path)) {
            err = std::string(which) + ".path must be a string";
            return false;
        }
        out = std::move(f);
        return true;
    }
    if (kind == "process") {
        ProcessDescriptor p;
        if (!get_string(j, "name", p.name) || !get_int(j, "pid", p.pid)) {
            err = std::string(which) + " requires string 'name' and integer 'pid'";
            return false;
        }
        out = std::move(p);
        return true;
    }
    if (kind == "socket") {
        SocketDescriptor s;
        if (!get_string(j, "sip", s.src_ip) || !get_int(j, "sport", s.src_port) ||
            !get_string(j, "dip", s.dst_ip) || !get_int(j, "dport", s.dst_port)) {
            err = std::string(which) + " requires sip/sport/dip/dport";
            return false;
        }
        out = std::move(s);
        return true;
    }
    err = std::string(which) + ".kind must be one of file|process|socket, got '" + kind + "'";
    return false;
}

ParsedLine slow_parse(std::string_view line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
        // reparse with exceptions to recover the byte offset
        ParsedLine out;
        out.status = LineStatus::SyntaxError;
        try {
            json reparsed = json::parse(line);
            (void)reparsed;
            out.error = "malformed record";
        } catch (const json::parse_error& e) {
            out.error = e.what();
            out.error_offset = e.byte;
        }
        return out;
    }
    if (!j.is_object()) return schema_error("record must be a JSON object");

    RawRecord raw;
    if (!get_int(j, "ts", raw.ts)) return schema_error("ts must be an integer");
    if (!get_string(j, "op", raw.op)) return schema_error("op must be a string");
    auto bytes_it = j.find("bytes");
    if (bytes_it == j.end() || !bytes_it->is_number_integer()) return schema_error("bytes must be an integer");
    int64_t bytes = bytes_it->get<int64_t>();
    if (bytes < 0) {
        ParsedLine out;
        out.status = LineStatus::SemanticError;
        out.error = "bytes must be non-negative";
        return out;
    }
    raw.bytes = static_cast<uint64_t>(bytes);

    std::string err;
    auto subj_it = j.find("subj");
    auto obj_it = j.find("obj");
    if (subj_it == j.end() || !slow_descriptor(*subj_it, "subj", raw.subj, err)) {
        return schema_error(err.empty() ? "missing subj" : err);
    }
    if (obj_it == j.end() || !slow_descriptor(*obj_it, "obj", raw.obj, err)) {
        return schema_error(err.empty() ? "missing obj" : err);
    }
    return finish(std::move(raw));
}

void append_json_string(const std::string& s, std::string& out) {
    out += '"';
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
}

void append_entity(const EntityId& id, std::string& out) {
    out += "{\"kind\":\"";
    out += to_string(id.kind);
    out += "\",";
    switch (id.kind) {
        case EntityKind::File: {
            out += "\"path\":";
            append_json_string(id.key, out);
            break;
        }
        case EntityKind::Process: {
            size_t sep = id.key.rfind('#');
            out += "\"name\":";
            append_json_string(id.key.substr(0, sep), out);
            out += ",\"pid\":";
            out += id.key.substr(sep + 1);
            break;
        }
        case EntityKind::Socket: {
            size_t gt = id.key.find('>');
            size_t c1 = id.key.rfind(':', gt);
            size_t c2 = id.key.rfind(':');
            out += "\"sip\":";
            append_json_string(id.key.substr(0, c1), out);
            out += ",\"sport\":";
            out += id.key.substr(c1 + 1, gt - c1 - 1);
            out += ",\"dip\":";
            append_json_string(id.key.substr(gt + 1, c2 - gt - 1), out);
            out += ",\"dport\":";
            out += id.key.substr(c2 + 1);
            break;
        }
    }
    out += '}';
}

}  // namespace

ParsedLine parse_event_line(std::string_view line) {
    bool blank = true;
    for (char ch : line) {
        if (ch != ' ' && ch != '\t' && ch != '\r') {
            blank = false;
            break;
        }
    }
    if (blank) return {};

    RawRecord raw;
    if (fast_parse(line, raw)) {
        return finish(std::move(raw));
    }
    return slow_parse(line);
}

std::string serialize_event(const Event& e) {
    std::string out;
    serialize_event_to(e, out);
    return out;
}

void serialize_event_to(const Event& e, std::string& out) {
    out += "{\"ts\":";
    out += std::to_string(e.ti);
    out += ",\"op\":\"";
    out += to_string(e.op);
    out += "\",\"subj\":";
    append_entity(e.subject, out);
    out += ",\"obj\":";
    append_entity(e.object, out);
    out += ",\"bytes\":";
    out += std::to_string(e.bytes);
    out += '}';
}

void ParseCounters::add(LineStatus s) {
    switch (s) {
        case LineStatus::Ok: ++ok; break;
        case LineStatus::Blank: ++blank; break;
        case LineStatus::SkippedUnsupported: ++skipped_unsupported; break;
        case LineStatus::SyntaxError: ++syntax_errors; break;
        case LineStatus::SemanticError: ++semantic_errors; break;
    }
}

}  // namespace provsift
