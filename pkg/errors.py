# -*- coding: utf-8 -*-
"""
파이프라인 전체에서 쓰는 예외 모음.
메시지에는 문제 값(행 번호, magic, epoch/step, stage 이름)을 꼭 넣는다.
"""

from typing import Optional


class ScalError(RuntimeError):
    pass


class ParameterError(ScalError, ValueError):
    """잘못된 인자 (p > n, noise < 0, shape 불일치 등)"""


class DataFormatError(ScalError):
    """CSV / IDX 파일 형식 오류"""


class DegenerateInputError(ScalError):
    """sigma = 0, degree <= 0 처럼 계산 자체가 성립하지 않는 입력"""


class NumericalError(ScalError):
    """Jacobi 미수렴 등"""


class OracleScaleError(ScalError):
    """exact spectral clustering 에 넣기엔 n 이 너무 큼"""


class DivergenceError(ScalError):
    def __init__(self, epoch: int, step: int, loss: float):
        self.epoch = epoch
        self.step = step
        self.loss = loss
        super().__init__(f"training diverged at epoch={epoch} step={step} (loss={loss})")


class StageError(ScalError):
    def __init__(self, stage: str, cause: Optional[BaseException] = None):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}" if cause else f"[{stage}] failed")
