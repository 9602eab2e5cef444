"""候補式が A(p) の不動点であることを証明書と反例探索で確かめます。"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .certify import fixed_point_line, known_equivalence_line, known_equivalence_sides
from .config import KernelConfig, KripkeConfig, SynthConfig, VERIFY_METHODS
from .derivation import ProofBuilder
from .formula import Formula, LogicIndex, atoms, iff, logic_n, substitute
from .kernel import Certificate, check
from .kripke import CountermodelSearch
from .syntax import to_text
from .synthesis import FixedPointResult, FixedPointSynthesizer

NO_STRATEGY = "no certificate strategy"
CERT_OK = "certificate ok"
CERT_FAILED = "certificate failed"


class CandidateError(ValueError):
    """候補式に不動点の変数が含まれている場合の例外。"""

    def __init__(self, variable: str) -> None:
        self.variable = variable
        super().__init__(f"candidate contains {variable}")


@dataclass(slots=True)
class VerificationReport:
    """verify の結果。cert と kripke の判定を別々に持ちます。"""

    formula: Formula
    candidate: Formula
    var: str
    n: int
    method: str
    certificate_verdict: str | None = None
    strategy: str | None = None
    certificate: Certificate | None = None
    kripke_verdict: str | None = None
    max_worlds: int | None = None
    countermodel: dict[str, object] | None = None
    countermodel_world: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """反証 (検査に落ちた証明書か反例) がなければ真。証明戦略がないだけなら真のままです。"""

        return self.certificate_verdict != CERT_FAILED and self.countermodel is None

    @property
    def proved(self) -> bool:
        return self.certificate_verdict == CERT_OK

    def to_dict(self) -> dict[str, object]:
        return {
            "formula": to_text(self.formula),
            "candidate": to_text(self.candidate),
            "var": self.var,
            "n": self.n,
            "method": self.method,
            "certificate": self.certificate_verdict,
            "strategy": self.strategy,
            "certificate_lines": len(self.certificate.lines) if self.certificate else None,
            "kripke": self.kripke_verdict,
            "max_worlds": self.max_worlds,
            "countermodel": self.countermodel,
            "countermodel_world": self.countermodel_world,
            "proved": self.proved,
            "ok": self.ok,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


class FixpointVerifier:
    def __init__(
        self,
        n: int | LogicIndex,
        kernel: KernelConfig | None = None,
        synth: SynthConfig | None = None,
        kripke: KripkeConfig | None = None,
    ) -> None:
        self.n = logic_n(n)
        self.kernel = kernel or KernelConfig()
        self.synth = synth or SynthConfig()
        self.kripke = kripke or KripkeConfig()
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def verify(self, a: Formula, candidate: Formula, p: str, method: str = "both", max_worlds: int | None = None) -> VerificationReport:
        if method not in VERIFY_METHODS:
            raise ValueError(f"未知の検証方法です: {method!r}")
        if p in atoms(candidate):
            raise CandidateError(p)
        report = VerificationReport(a, candidate, p, self.n, method)
        if method in ("cert", "both"):
            self._verify_certificate(report)
        if method in ("kripke", "both"):
            self._verify_kripke(report, max_worlds)
        return report

    # Certificate strategies -------------------------------------------------------

    def _verify_certificate(self, report: VerificationReport) -> None:
        a, candidate, p = report.formula, report.candidate, report.var
        synthesizer = FixedPointSynthesizer(self.n, self.synth, self.kernel.atom_budget)
        goal = iff(candidate, substitute(a, p, candidate))
        for shortcut in (True, False):
            result = synthesizer.solve(a, p, want_cert=False, prefer_shortcut=shortcut)
            for allow_known in (False, True):
                if allow_known and self.n != 3:
                    continue
                builder = ProofBuilder(self.n, self.kernel.atom_budget)
                try:
                    line, strategy = self._certificate_line(builder, a, p, candidate, result, allow_known)
                except ValueError as exc:
                    self._logger.info("戦略が失敗しました: %s", exc)
                    continue
                if line is None:
                    continue
                if builder.formula(line) != goal:
                    continue
                cert = builder.certificate(line)
                verdict = check(cert, self.n, self.kernel.atom_budget)
                report.certificate = cert
                report.strategy = strategy
                report.certificate_verdict = CERT_OK if verdict.ok else CERT_FAILED
                if not verdict.ok:
                    report.notes.append(f"{verdict.line} 行目: {verdict.reason}")
                return
        report.certificate_verdict = NO_STRATEGY

    def _certificate_line(
        self,
        builder: ProofBuilder,
        a: Formula,
        p: str,
        candidate: Formula,
        result: FixedPointResult,
        allow_known: bool,
    ) -> tuple[int | None, str]:
        fixed = result.fixed_point
        fixed_line = fixed_point_line(builder, a, p, result)
        if candidate == fixed:
            return fixed_line, "synthesized"
        if allow_known:
            bridge = self._known_bridge(builder, candidate, fixed)
            strategy = "known-equivalence"
        else:
            bridge = builder.derive_equivalence(candidate, fixed)
            strategy = "k-equivalence"
        if bridge is None:
            return None, strategy
        # bridge: C ↔ F, 置換で A(F) ↔ A(C)
        flipped = builder.chain([bridge], iff(fixed, candidate))
        lifted = builder.replace(a, {p: flipped})
        goal = iff(candidate, substitute(a, p, candidate))
        return builder.chain([bridge, fixed_line, lifted], goal), strategy

    @staticmethod
    def _known_bridge(builder: ProofBuilder, candidate: Formula, fixed: Formula) -> int | None:
        left, right = known_equivalence_sides()
        for near, far in ((left, right), (right, left)):
            head = builder.derive_equivalence(candidate, near)
            tail = builder.derive_equivalence(far, fixed)
            if head is None or tail is None:
                continue
            known = known_equivalence_line(builder)
            return builder.chain([head, known, tail], iff(candidate, fixed))
        return None

    # Countermodel search --------------------------------------------------------------

    def _verify_kripke(self, report: VerificationReport, max_worlds: int | None) -> None:
        limit = self.kripke.max_worlds if max_worlds is None else max_worlds
        target = iff(report.candidate, substitute(report.formula, report.var, report.candidate))
        found = CountermodelSearch(self.n, self.kripke).search(target, limit)
        report.max_worlds = limit
        if found is None:
            report.kripke_verdict = f"no countermodel <= {limit} worlds"
            return
        model, world = found
        report.kripke_verdict = "countermodel found"
        report.countermodel = model.to_dict()
        report.countermodel_world = world


def verify_fixpoint(
    a: Formula,
    candidate: Formula,
    p: str,
    n: int | LogicIndex,
    method: str = "both",
    max_worlds: int | None = None,
) -> VerificationReport:
    return FixpointVerifier(n).verify(a, candidate, p, method, max_worlds)
