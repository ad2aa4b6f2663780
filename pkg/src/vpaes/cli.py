"""Command-line front end: encrypt, decrypt, analyze, select-score,
sensitivity.

Exit codes: 0 ok, 2 bad key, 3 bad image, 4 I/O, 5 bad container,
6 statistical-test precondition unmet, 1 any other package error.
"""

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass

from . import randstat
from .cipher import encrypt_payload, decrypt_payload
from .errors import (
    ContainerError,
    ImageFormatError,
    KeyFormatError,
    PreconditionError,
    VpaesError,
)
from .imageio import (
    MAGIC,
    CipherContainer,
    ImageBuffer,
    _atomic_write,
    load_image,
    pad_payload,
    read_container,
    save_cipher_view,
    save_image,
    unpad_payload,
    write_container,
)
from .keystream import Key128, key_to_integer

_KEY_MODULUS = 1 << 128


@dataclass
class RunConfig:
    command: str
    input: str = None
    output: str = None
    key: Key128 = None
    alpha: float = 0.01
    samples: int = randstat.DEFAULT_SAMPLES
    seed: int = 0
    view: str = None
    report: str = "text"
    threads: int = 1


def parse_key_hex(text):
    """16 key bytes from 32 hex characters.

    A 31-character string is accepted as well (left-padded with one zero):
    some published key listings drop the leading zero.
    """
    t = text.strip().lower()
    if len(t) == 31:
        t = "0" + t
    if len(t) != 32:
        raise KeyFormatError(
            f"key must be 32 hex characters, got {len(text)}")
    try:
        data = bytes.fromhex(t)
    except ValueError:
        raise KeyFormatError(f"key is not valid hexadecimal: {text!r}") from None
    if data == bytes(16):
        raise KeyFormatError(
            "the all-zero key is invalid: it degenerates the keystream")
    return Key128(data)


def _sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _emit_report(cfg, document):
    if cfg.report == "json":
        text = json.dumps(document, sort_keys=True, indent=2) + "\n"
    else:
        lines = []
        for entry in document["results"]:
            lead = f"{entry['test']:<24} {entry.get('channel', ''):<6}"
            if "error" in entry:
                lines.append(f"{lead} error: {entry['error']}")
                continue
            line = f"{lead} statistic={entry['statistic']:.6g}"
            if "p_value" in entry:
                line += (f" p_value={entry['p_value']:.6g}"
                         f" decision={entry['decision']}")
            lines.append(line)
        text = "\n".join(lines) + "\n"
    if cfg.output:
        _atomic_write(cfg.output, text.encode())
    else:
        sys.stdout.write(text)


def _entry(report):
    out = {"test": report.test, "channel": report.channel,
           "statistic": report.statistic}
    if report.p_value is not None:
        out["p_value"] = report.p_value
        out["alpha"] = report.alpha
        out["decision"] = report.decision
    out.update(report.extras)
    return out


def _load_plain_or_cipher(path):
    """An image for analysis: raster files load directly, containers are
    reinterpreted as a raster of their ciphertext bytes (padding dropped)."""
    with open(path, "rb") as f:
        head = f.read(len(MAGIC))
    if head == MAGIC:
        c = read_container(path)
        pixels = c.width * c.height * c.channels
        return ImageBuffer(c.width, c.height, c.channels, c.payload[:pixels])
    return load_image(path)


def cmd_encrypt(cfg):
    img = load_image(cfg.input)
    padded, pad_len = pad_payload(img.data)
    start = time.perf_counter()
    ciphertext = encrypt_payload(padded, cfg.key, threads=cfg.threads)
    elapsed = time.perf_counter() - start
    container = CipherContainer(
        img.width, img.height, img.channels, pad_len, ciphertext)
    write_container(container, cfg.output)
    if cfg.view:
        save_cipher_view(container, cfg.view)
    print(f"blocks={len(padded) // 16} pad_len={pad_len} "
          f"elapsed={elapsed:.3f}s")
    return 0


def cmd_decrypt(cfg):
    container = read_container(cfg.input)
    plain = decrypt_payload(container.payload, cfg.key, threads=cfg.threads)
    data = unpad_payload(plain, container.pad_len)
    save_image(ImageBuffer(container.width, container.height,
                           container.channels, data), cfg.output)
    print(f"wrote {cfg.output}")
    return 0


def _analysis_results(img, cfg):
    results = []
    failed = False
    channels = randstat.channel_names(img.channels)

    def run(name, channel, fn):
        nonlocal failed
        try:
            results.append(_entry(fn()))
        except VpaesError as exc:
            results.append({"test": name, "channel": channel,
                            "error": str(exc)})
            failed = True

    for ch in channels:
        hist = randstat.tone_histogram(img, ch)
        run("entropy", ch, lambda c=ch, h=hist: randstat.TestReport(
            "entropy", c, randstat.entropy(h)))
    for direction in randstat.DIRECTIONS:
        for ch in channels:
            run(f"correlation_{direction}", ch,
                lambda d=direction, c=ch: randstat.TestReport(
                    f"correlation_{d}", c, randstat.correlation(
                        randstat.sample_adjacent_pairs(
                            img, d, c, cfg.samples, cfg.seed))))
    for ch in channels:
        run("spectral_dft", ch, lambda c=ch: randstat.spectral_dft_test(
            randstat.channel_bits(img, c), cfg.alpha, c))
    for ch in channels:
        run("chi_square_tone", ch, lambda c=ch: randstat.chi_square_tone_test(
            randstat.tone_histogram(img, c), cfg.alpha))
    return results, failed


def cmd_analyze(cfg):
    img = _load_plain_or_cipher(cfg.input)
    results, failed = _analysis_results(img, cfg)
    _emit_report(cfg, {
        "command": "analyze",
        "input": cfg.input,
        "input_sha256": _sha256_file(cfg.input),
        "seed": cfg.seed,
        "alpha": cfg.alpha,
        "samples": cfg.samples,
        "results": results,
    })
    return 6 if failed else 0


def cmd_select_score(cfg):
    img = load_image(cfg.input)
    scores = randstat.plaintext_selection_score(img)
    _emit_report(cfg, {
        "command": "select-score",
        "input": cfg.input,
        "input_sha256": _sha256_file(cfg.input),
        "results": [
            {"test": "selection_score", "channel": ch, "statistic": value}
            for ch, value in scores.items()
        ],
    })
    return 0


def cmd_sensitivity(cfg):
    img = load_image(cfg.input)
    padded, pad_len = pad_payload(img.data)
    bumped = (key_to_integer(cfg.key) + 1) % _KEY_MODULUS
    if bumped == 0:
        raise KeyFormatError(
            "key + 1 wraps to the all-zero key, which is invalid")
    key_next = Key128(bumped.to_bytes(16, "big"))
    containers = [
        CipherContainer(img.width, img.height, img.channels, pad_len,
                        encrypt_payload(padded, k, threads=cfg.threads))
        for k in (cfg.key, key_next)
    ]
    correlations = randstat.sensitivity_correlation(
        containers[0], containers[1], cfg.samples, cfg.seed)
    results = [
        {"test": "sensitivity_correlation", "channel": ch, "statistic": r}
        for ch, r in correlations.items()
    ]
    results.append({
        "test": "sensitivity_correlation_max_abs", "channel": "all",
        "statistic": max(abs(r) for r in correlations.values()),
    })
    _emit_report(cfg, {
        "command": "sensitivity",
        "input": cfg.input,
        "input_sha256": _sha256_file(cfg.input),
        "seed": cfg.seed,
        "samples": cfg.samples,
        "results": results,
    })
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="vpaes",
        description="Lossless image encryption with per-block variable "
                    "bit permutations, plus a randomness test battery.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, *, key=False, output=False, stats=False, view=False):
        p = sub.add_parser(name)
        p.set_defaults(fn=fn, needs_key=key)
        p.add_argument("--in", dest="input", required=True,
                       metavar="PATH", help="input file")
        if output:
            p.add_argument("--out", dest="output", required=True,
                           metavar="PATH", help="output file")
        else:
            p.add_argument("--out", dest="output", metavar="PATH",
                           help="write the report here instead of stdout")
        if key:
            p.add_argument("--key", required=True, metavar="HEX32",
                           help="128-bit key as 32 hex characters")
        if stats:
            p.add_argument("--alpha", type=float, default=0.01,
                           choices=[0.01, 0.001])
            p.add_argument("--samples", type=int, default=3000)
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--report", choices=["text", "json"], default="text")
        if view:
            p.add_argument("--view", metavar="PATH",
                           help="also write the ciphertext as a P6 image")
        p.add_argument("--threads", type=int, default=1)
        return p

    add("encrypt", cmd_encrypt, key=True, output=True, view=True)
    add("decrypt", cmd_decrypt, key=True, output=True)
    add("analyze", cmd_analyze, stats=True)
    add("select-score", cmd_select_score)
    add("sensitivity", cmd_sensitivity, key=True, stats=True)
    return parser


def _config_from(args):
    return RunConfig(
        command=args.command,
        input=args.input,
        output=getattr(args, "output", None),
        key=parse_key_hex(args.key) if getattr(args, "needs_key", False)
        else None,
        alpha=getattr(args, "alpha", 0.01),
        samples=getattr(args, "samples", randstat.DEFAULT_SAMPLES),
        seed=getattr(args, "seed", 0),
        view=getattr(args, "view", None),
        report=getattr(args, "report", "text"),
        threads=getattr(args, "threads", 1),
    )


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(_config_from(args))
    except KeyFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ImageFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ContainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 6
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except VpaesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
