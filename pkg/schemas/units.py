"""단위 정규화의 단일 출처(single source of truth).

벤치마크 데이터셋 파일은 측정 당시 단위(ms, e/sec, Mbps, mA)를 그대로 쓰고,
평가·솔버 내부는 SI 단위(초, events/second, bits/second, mAh)만 다룬다.
변환은 전부 이 모듈을 거친다. 흩어진 ``/ 1000`` 상수가 단위 혼동의 주된 원인이었다.
"""
from __future__ import annotations

SECONDS_PER_HOUR = 3600.0
BITS_PER_BYTE = 8

_MS_PER_SECOND = 1000.0
_BITS_PER_MEGABIT = 1_000_000.0


def ms_to_seconds(value_ms: float) -> float:
    return value_ms / _MS_PER_SECOND


def seconds_to_ms(value_s: float) -> float:
    return value_s * _MS_PER_SECOND


def mbps_to_bps(value_mbps: float) -> float:
    """Mbps(10^6 bits/s)를 bits/s로 변환."""
    return value_mbps * _BITS_PER_MEGABIT


def bytes_to_bits(value_bytes: float) -> float:
    return value_bytes * BITS_PER_BYTE


def seconds_to_hours(value_s: float) -> float:
    return value_s / SECONDS_PER_HOUR


def charge_mah(current_ma: float, duration_s: float) -> float:
    """일정 전류(mA)를 duration_s 동안 흘렸을 때 소모 전하량(mAh)."""
    return current_ma * seconds_to_hours(duration_s)


def transfer_seconds(size_bytes: float, bandwidth_bps: float) -> float:
    """size_bytes 크기 이벤트 1개를 bandwidth_bps 링크로 보내는 시간(초)."""
    if bandwidth_bps <= 0:
        raise ValueError("bandwidth must be positive")
    return bytes_to_bits(size_bytes) / bandwidth_bps
