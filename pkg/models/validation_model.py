# validation_model.py
import numpy as np

from schemas.system_schema import SystemModel, Violation


class ValidationModel:
    @staticmethod
    def spectral_radius(a: np.ndarray) -> float:
        if a.size == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(a))))

    @staticmethod
    def validate_model(m: SystemModel, require_stable: bool = True) -> list[Violation]:
        """Lists every broken SystemModel invariant; an empty list means the model is valid.

        Estimated models may legitimately be unstable, so callers checking them pass
        require_stable=False.
        """
        violations = []
        for name in ("a", "b", "r"):
            arr = getattr(m, name)
            for i, j in np.argwhere(arr < 0):
                violations.append(Violation(
                    invariant="nonnegative",
                    index=[int(i), int(j)],
                    detail=f"{name}[{i}][{j}] = {arr[i, j]!r} < 0",
                ))
        if require_stable:
            rho = ValidationModel.spectral_radius(m.a)
            if rho >= 1:
                violations.append(Violation(
                    invariant="spectral-radius",
                    detail=f"spectral radius of a is {rho!r}, must be < 1",
                ))
        for i in np.flatnonzero(np.diag(m.r) <= 0):
            violations.append(Violation(
                invariant="positive-diagonal",
                index=[int(i), int(i)],
                detail=f"r[{i}][{i}] = {m.r[i, i]!r} must be > 0",
            ))
        return violations
