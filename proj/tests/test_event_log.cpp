#include <doctest.h>

#include "merkki/event_log.hpp"
#include "merkki/rng.hpp"
#include "support.hpp"

using namespace merkki;

namespace {

std::string line(const char* text) { return std::string{text} + "\n"; }

std::size_t error_line(const std::string& text) {
    try {
        parse_log(text);
    } catch (const LogParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("event kind names round-trip") {
    for (int k = 0; k <= static_cast<int>(EventKind::PowerOff); ++k) {
        const auto kind = static_cast<EventKind>(k);
        CHECK(parse_event_kind(to_string(kind)) == kind);
    }
    CHECK_FALSE(parse_event_kind("EXPLODE"));
    CHECK(to_string(EventKind::HoldRStart) == "HOLD_R_START");
}

TEST_CASE("record serialisation layout") {
    const auto rec = make_exchange_record(SimTime::from_ms(1500), DeviceId{4},
                                          {DeviceId{9}, PictureId{30}, PictureId{12}, true});
    CHECK(serialize_record(rec) == "1.500\t4\tEXCHANGE\tduplicate=1\tpartner=9\treceived=12\tsent=30");
    CHECK(exchange_payload(rec) == ExchangePayload{DeviceId{9}, PictureId{30}, PictureId{12}, true});

    EventRecord off{SimTime::from_ms(7), DeviceId{1}, EventKind::PowerOff, {{"reason", "user"}}};
    CHECK(serialize_record(off) == "0.007\t1\tPOWER_OFF\treason=user");
    EventRecord tap{SimTime{}, DeviceId{2}, EventKind::TapR, {}};
    CHECK(serialize_record(tap) == "0.000\t2\tTAP_R");
}

TEST_CASE("parse accepts canonical text") {
    const std::string text = line("0.000\t1\tPOWER_ON\tbattery=1000.000\tpictures=3,7\tselected=3") +
                             line("0.000\t2\tTAP_R") + line("2.500\t1\tEXCHANGE\tduplicate=0\tpartner=2\treceived=4\tsent=3");
    const auto log = parse_log(text);
    REQUIRE(log.size() == 3);
    CHECK(log[0].kind == EventKind::PowerOn);
    CHECK(*log[0].field("pictures") == "3,7");
    CHECK(log[2].time == SimTime::from_ms(2500));
    CHECK(serialize_log(log) == text);
    CHECK(parse_log("").empty());
}

TEST_CASE("parse rejects non-canonical text with the offending line") {
    const auto ok = line("0.000\t1\tTAP_R");
    CHECK(error_line(ok + "0.000\t1\tTAP_R") == 2);                           // no trailing newline
    CHECK(error_line(ok + line("0.00\t1\tTAP_R")) == 2);                      // time format
    CHECK(error_line(line("1.000\t1\tTAP_R") + line("0.500\t1\tTAP_R")) == 2);  // time goes back
    CHECK(error_line(ok + line("0.000\t01\tTAP_R")) == 2);                    // leading zero id
    CHECK(error_line(ok + line("0.000\t1\tTAP_X")) == 2);                     // unknown kind
    CHECK(error_line(line("0.000\t1\tPOWER_OFF\treason")) == 1);              // not key=value
    CHECK(error_line(line("0.000\t1\tTEMPO_SET\tsource=1\tbpm=120.000")) == 1);  // unsorted keys
    CHECK(error_line(line("0.000\t1\tEXCHANGE\tpartner=2")) == 1);            // incomplete exchange
    CHECK(error_line(line("0.000 1 TAP_R")) == 1);
}

TEST_CASE("picture lists") {
    CHECK(format_picture_list({PictureId{3}, PictureId{10}}) == "3,10");
    CHECK(format_picture_list({}) == "");
    CHECK(parse_picture_list("3,10") == std::vector<PictureId>{PictureId{3}, PictureId{10}});
    CHECK(parse_picture_list("")->empty());
    CHECK_FALSE(parse_picture_list("3,,4"));
    CHECK_FALSE(parse_picture_list("3,"));
    CHECK(format_fixed3(120.0) == "120.000");
    CHECK(format_fixed3(997.0004) == "997.000");
}

TEST_CASE("sort orders by time, device, then kind rank") {
    EventLog log{
        {SimTime::from_ms(5), DeviceId{2}, EventKind::PowerOff, {{"reason", "user"}}},
        {SimTime::from_ms(5), DeviceId{1}, EventKind::SearchStart, {{"picture", "1"}}},
        {SimTime::from_ms(5), DeviceId{1}, EventKind::HoldRStart, {}},
        {SimTime::from_ms(1), DeviceId{9}, EventKind::TapL, {}},
    };
    sort_log(log);
    CHECK(log[0].device == DeviceId{9});
    CHECK(log[1].kind == EventKind::HoldRStart);
    CHECK(log[2].kind == EventKind::SearchStart);
    CHECK(log[3].device == DeviceId{2});
}

TEST_CASE("serialize(parse(x)) is the identity on generated logs") {
    Rng rng(99);
    for (int round = 0; round < 50; ++round) {
        auto generated = testing::random_exchange_log(rng, 2 + rng.uniform_index(6), 1 + rng.uniform_index(4),
                                                      10 + rng.uniform_index(200));
        const auto text = serialize_log(generated.log);
        const auto parsed = parse_log(text);
        CHECK(parsed == generated.log);
        CHECK(serialize_log(parsed) == text);
    }
}
