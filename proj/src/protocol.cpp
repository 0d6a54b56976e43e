#include "ptpsec/protocol.hpp"

#include <algorithm>

namespace ptpsec {

DurationNs compute_offset(const SyncRoundRecord& rec) {
    if (!rec.has_sync_quad())
        throw SimError(Errc::incomplete_round, "offset needs t1..t4");
    return ((*rec.t2 - *rec.t1) - (*rec.t4 - *rec.t3)) / 2;
}

DurationNs expected_offset_under_attack(DurationNs theta_true, DurationNs eps1, DurationNs eps2) {
    return theta_true + (eps1 - eps2) / 2;
}

RttPair rtt_measurements(const SyncRoundRecord& rec) {
    if (!rec.complete())
        throw SimError(Errc::incomplete_round, "RTTs need all eight timestamps");
    RttPair rtt;
    rtt.forward = (*rec.tm2 - *rec.t1) - (*rec.tm1 - *rec.t2);
    rtt.reverse = (*rec.tm4 - *rec.t3) - (*rec.tm3 - *rec.t4);
    return rtt;
}

DurationNs asymmetry_estimate(DurationNs rtt_forward, DurationNs rtt_reverse) {
    return rtt_forward - rtt_reverse;
}

DurationNs rectified_offset(DurationNs theta_rep, DurationNs alpha) {
    return theta_rep - alpha / 2;
}

int messages_per_cycle(int redundant_paths) {
    if (redundant_paths < 0)
        throw SimError(Errc::validation_error, "redundant path count must be >= 0");
    return 4 + 4 * redundant_paths;
}

std::vector<int> measured_paths(const ProtocolConfig& cfg, std::uint64_t seq) {
    if (cfg.mode == SyncMode::ptp || cfg.redundant_paths == 0)
        return {};
    if (cfg.policy == PathPolicy::round_robin)
        return {1 + static_cast<int>(seq % static_cast<std::uint64_t>(cfg.redundant_paths))};
    std::vector<int> all(static_cast<std::size_t>(cfg.redundant_paths));
    for (int i = 0; i < cfg.redundant_paths; ++i)
        all[static_cast<std::size_t>(i)] = i + 1;
    return all;
}

namespace {

void check_config(const ProtocolConfig& cfg) {
    if (cfg.sync_interval <= 0)
        throw SimError(Errc::validation_error, "sync interval must be positive");
    if (cfg.residence < 0)
        throw SimError(Errc::validation_error, "residence time must be >= 0");
    if (cfg.mode == SyncMode::ptpsec && cfg.redundant_paths < 1)
        throw SimError(Errc::no_redundant_path,
                       "secured mode needs at least one redundant path");
}

Message make(MessageKind kind, std::uint64_t seq, int path_index) {
    Message m;
    m.kind = kind;
    m.seq = seq;
    m.path_index = path_index;
    return m;
}

TimeNs require_origin(const Message& msg) {
    if (!msg.origin_timestamp)
        throw SimError(Errc::validation_error,
                       std::string(to_string(msg.kind)) + " without conveyed timestamp");
    return *msg.origin_timestamp;
}

} // namespace

MasterSession::MasterSession(ProtocolConfig cfg) : cfg_(cfg) { check_config(cfg_); }

std::vector<Emission> MasterSession::start_round(std::uint64_t seq) {
    if (rounds_.count(seq) || seq < stale_floor_)
        throw SimError(Errc::duplicate_message, "round " + std::to_string(seq) + " already started");
    Round& round = rounds_[seq];
    round.measured = measured_paths(cfg_, seq);
    for (int i : round.measured)
        round.paths[i];
    return {Emission{make(MessageKind::sync, seq, 0), 0}};
}

MasterSession::Round& MasterSession::round_for(std::uint64_t seq, MessageKind kind) {
    auto it = rounds_.find(seq);
    if (it == rounds_.end()) {
        if (seq < stale_floor_)
            throw SimError(Errc::stale_round, std::string(to_string(kind)) + " for expired round " +
                                                  std::to_string(seq));
        throw SimError(Errc::unknown_seq, std::string(to_string(kind)) + " for unknown round " +
                                              std::to_string(seq));
    }
    return it->second;
}

std::vector<Emission> MasterSession::on_egress(const Message& msg, TimeNs egress_ts) {
    Round& round = round_for(msg.seq, msg.kind);
    switch (msg.kind) {
    case MessageKind::sync: {
        if (round.t1)
            throw SimError(Errc::duplicate_message, "Sync egress already captured");
        round.t1 = egress_ts;
        Message fup = make(MessageKind::follow_up, msg.seq, 0);
        fup.origin_timestamp = egress_ts;
        return {Emission{fup, 0}};
    }
    case MessageKind::meas: {
        auto it = round.paths.find(msg.path_index);
        if (it == round.paths.end())
            throw SimError(Errc::validation_error, "Meas egress on unmeasured path");
        if (it->second.tm3)
            throw SimError(Errc::duplicate_message, "Meas egress already captured");
        it->second.tm3 = egress_ts;
        Message fup = make(MessageKind::meas_fup, msg.seq, msg.path_index);
        fup.origin_timestamp = egress_ts;
        fup.meas_ingress_echo = it->second.tm2;
        return {Emission{fup, 0}};
    }
    default:
        return {};
    }
}

std::vector<Emission> MasterSession::handle_message(const Message& msg, TimeNs ingress_ts) {
    Round& round = round_for(msg.seq, msg.kind);
    switch (msg.kind) {
    case MessageKind::meas: {
        auto it = round.paths.find(msg.path_index);
        if (it == round.paths.end())
            throw SimError(Errc::validation_error, "Meas on unmeasured path");
        if (it->second.tm2)
            throw SimError(Errc::duplicate_message, "duplicate Meas");
        it->second.tm2 = ingress_ts;
        return maybe_respond(msg.seq, round);
    }
    case MessageKind::meas_fup: {
        auto it = round.paths.find(msg.path_index);
        if (it == round.paths.end())
            throw SimError(Errc::validation_error, "Meas_Fup on unmeasured path");
        if (it->second.tm1)
            throw SimError(Errc::duplicate_message, "duplicate Meas_Fup");
        it->second.tm1 = require_origin(msg);
        return maybe_respond(msg.seq, round);
    }
    case MessageKind::delay_req: {
        if (round.t4)
            throw SimError(Errc::duplicate_message, "duplicate Delay_Req");
        round.t4 = ingress_ts;
        return maybe_respond(msg.seq, round);
    }
    default:
        throw SimError(Errc::validation_error, std::string(to_string(msg.kind)) +
                                                   " is not a master-bound message");
    }
}

std::vector<Emission> MasterSession::maybe_respond(std::uint64_t seq, Round& round) {
    if (round.responded || !round.t4)
        return {};
    for (const auto& [index, per_path] : round.paths) {
        if (!per_path.tm2 || !per_path.tm1)
            return {};
    }
    round.responded = true;

    std::vector<Emission> out;
    for (int i : round.measured)
        out.push_back(Emission{make(MessageKind::meas, seq, i), cfg_.residence});
    Message resp = make(MessageKind::delay_resp, seq, 0);
    resp.origin_timestamp = round.t4;
    out.push_back(Emission{resp, cfg_.residence});
    return out;
}

bool MasterSession::expire_round(std::uint64_t seq) {
    stale_floor_ = std::max(stale_floor_, seq + 1);
    auto it = rounds_.find(seq);
    if (it == rounds_.end())
        return true;
    bool incomplete = !it->second.responded;
    rounds_.erase(it);
    return incomplete;
}

SlaveSession::SlaveSession(ProtocolConfig cfg) : cfg_(cfg) {
    check_config(cfg_);
    servo_.mode = cfg_.mode;
}

SlaveSession::Round& SlaveSession::open_or_get(std::uint64_t seq) {
    if (seq < stale_floor_)
        throw SimError(Errc::stale_round, "message for expired round " + std::to_string(seq));
    auto [it, fresh] = rounds_.try_emplace(seq);
    if (fresh) {
        it->second.measured = measured_paths(cfg_, seq);
        for (int i : it->second.measured)
            it->second.paths[i];
    }
    return it->second;
}

SlaveSession::Round& SlaveSession::existing(std::uint64_t seq, MessageKind kind) {
    auto it = rounds_.find(seq);
    if (it == rounds_.end()) {
        if (seq < stale_floor_)
            throw SimError(Errc::stale_round, std::string(to_string(kind)) + " for expired round " +
                                                  std::to_string(seq));
        throw SimError(Errc::unknown_seq, std::string(to_string(kind)) + " for unknown round " +
                                              std::to_string(seq));
    }
    return it->second;
}

std::vector<Emission> SlaveSession::handle_message(const Message& msg, TimeNs ingress_ts) {
    switch (msg.kind) {
    case MessageKind::sync: {
        // Sync (or its Follow_Up, which can overtake a delayed Sync)
        // opens the round.
        Round& round = open_or_get(msg.seq);
        if (round.t2)
            throw SimError(Errc::duplicate_message, "duplicate Sync");
        round.t2 = ingress_ts;
        std::vector<Emission> out;
        for (int i : round.measured)
            out.push_back(Emission{make(MessageKind::meas, msg.seq, i), cfg_.residence});
        out.push_back(Emission{make(MessageKind::delay_req, msg.seq, 0), cfg_.residence});
        return out;
    }
    case MessageKind::follow_up: {
        Round& round = open_or_get(msg.seq);
        if (round.t1)
            throw SimError(Errc::duplicate_message, "duplicate Follow_Up");
        round.t1 = require_origin(msg);
        try_finish(msg.seq, round);
        return {};
    }
    case MessageKind::meas: {
        Round& round = existing(msg.seq, msg.kind);
        auto it = round.paths.find(msg.path_index);
        if (it == round.paths.end())
            throw SimError(Errc::validation_error, "Meas on unmeasured path");
        if (it->second.tm4)
            throw SimError(Errc::duplicate_message, "duplicate Meas");
        it->second.tm4 = ingress_ts;
        try_finish(msg.seq, round);
        return {};
    }
    case MessageKind::meas_fup: {
        Round& round = existing(msg.seq, msg.kind);
        auto it = round.paths.find(msg.path_index);
        if (it == round.paths.end())
            throw SimError(Errc::validation_error, "Meas_Fup on unmeasured path");
        if (it->second.tm3)
            throw SimError(Errc::duplicate_message, "duplicate Meas_Fup");
        if (!msg.meas_ingress_echo)
            throw SimError(Errc::validation_error, "Meas_Fup without t_m2 echo");
        it->second.tm3 = require_origin(msg);
        it->second.tm2_echo = msg.meas_ingress_echo;
        try_finish(msg.seq, round);
        return {};
    }
    case MessageKind::delay_resp: {
        Round& round = existing(msg.seq, msg.kind);
        if (round.t4)
            throw SimError(Errc::duplicate_message, "duplicate Delay_Resp");
        round.t4 = require_origin(msg);
        try_finish(msg.seq, round);
        return {};
    }
    default:
        throw SimError(Errc::validation_error,
                       std::string(to_string(msg.kind)) + " is not a slave-bound message");
    }
}

std::vector<Emission> SlaveSession::on_egress(const Message& msg, TimeNs egress_ts) {
    Round& round = existing(msg.seq, msg.kind);
    switch (msg.kind) {
    case MessageKind::delay_req: {
        if (round.t3)
            throw SimError(Errc::duplicate_message, "Delay_Req egress already captured");
        round.t3 = egress_ts;
        try_finish(msg.seq, round);
        return {};
    }
    case MessageKind::meas: {
        auto it = round.paths.find(msg.path_index);
        if (it == round.paths.end())
            throw SimError(Errc::validation_error, "Meas egress on unmeasured path");
        if (it->second.tm1)
            throw SimError(Errc::duplicate_message, "Meas egress already captured");
        it->second.tm1 = egress_ts;
        Message fup = make(MessageKind::meas_fup, msg.seq, msg.path_index);
        fup.origin_timestamp = egress_ts;
        return {Emission{fup, 0}};
    }
    default:
        return {};
    }
}

void SlaveSession::try_finish(std::uint64_t seq, Round& round) {
    if (round.done || !round.t1 || !round.t2 || !round.t3 || !round.t4)
        return;
    for (const auto& [index, p] : round.paths) {
        if (!p.tm1 || !p.tm4 || !p.tm3 || !p.tm2_echo)
            return;
    }
    round.done = true;

    RoundResult result;
    result.seq = seq;

    SyncRoundRecord quad;
    quad.seq = seq;
    quad.t1 = round.t1;
    quad.t2 = round.t2;
    quad.t3 = round.t3;
    quad.t4 = round.t4;
    result.theta_rep = compute_offset(quad);

    if (cfg_.mode == SyncMode::ptpsec) {
        detection::EstimateSet estimates;
        estimates.seq = seq;
        estimates.threshold = cfg_.detect_threshold;
        for (int i : round.measured) {
            const PerPath& p = round.paths.at(i);
            SyncRoundRecord rec = quad;
            rec.path_index = i;
            rec.tm1 = p.tm1;
            rec.tm2 = p.tm2_echo;
            rec.tm3 = p.tm3;
            rec.tm4 = p.tm4;
            RttPair rtt = rtt_measurements(rec);
            DurationNs alpha = asymmetry_estimate(rtt.forward, rtt.reverse);
            result.measurements.push_back({i, rtt.forward, rtt.reverse, alpha});
            estimates.estimates.push_back(alpha);
        }
        result.verdict = detection::detect(estimates);
        // Rotation rounds carry fewer estimates than the configured bound
        // may assume; the per-round bound caps at floor(estimates/2).
        int bound = std::min(cfg_.attacker_bound,
                             static_cast<int>(estimates.estimates.size()) / 2);
        result.localization = detection::consensus_asymmetry(estimates, bound);
        result.consensus_alpha = result.localization->consensus_alpha;
        result.theta_rect = rectified_offset(result.theta_rep, result.consensus_alpha);
        result.correction = result.theta_rect;
    } else {
        result.consensus_alpha = 0;
        result.theta_rect = result.theta_rep; // conventional mode: no rectification
        result.correction = result.theta_rep;
    }

    servo_.theta_rep = result.theta_rep;
    servo_.alpha = result.consensus_alpha;
    servo_.theta_rect = result.theta_rect;

    completed_.push_back(std::move(result));
}

bool SlaveSession::expire_round(std::uint64_t seq) {
    stale_floor_ = std::max(stale_floor_, seq + 1);
    auto it = rounds_.find(seq);
    bool dropped = it == rounds_.end() || !it->second.done;
    if (it != rounds_.end())
        rounds_.erase(it);
    if (dropped)
        ++dropped_;
    return dropped;
}

std::vector<RoundResult> SlaveSession::take_completed() {
    std::vector<RoundResult> out;
    out.swap(completed_);
    return out;
}

} // namespace ptpsec
