"""Learners used on top of the feature vectors, plus neighbour-vote baselines."""
import enum
from dataclasses import asdict, dataclass

from .knn import KNNClassifier
from .linear import LinearRegression, householder_qr_pivoted, lstsq_qr
from .naive_bayes import GaussianNB
from .relational import WVRN, Majority
from .svm import LinearSVM
from .tree import DecisionTreeClassifier, gini, split_impurity


class ModelKind(str, enum.Enum):
    KNN = "knn"
    NB = "nb"
    DT = "dt"
    SVM = "svm"
    LR = "lr"
    WVRN = "wvrn"
    MAJORITY = "majority"

    @property
    def relational(self):
        return self in (ModelKind.WVRN, ModelKind.MAJORITY)

    @property
    def regression(self):
        return self is ModelKind.LR


@dataclass
class ModelSpec:
    kind: ModelKind = ModelKind.KNN
    knn_k: int = 10
    nb_smoothing: float = 0.0
    svm_c: float = 1.0
    svm_epochs: int = 200
    dt_criterion: str = "gini"
    dt_max_depth: int = 20
    seed: int = 0

    def __post_init__(self):
        self.kind = ModelKind(str(self.kind.value if isinstance(self.kind, ModelKind)
                                  else self.kind).lower())
        if self.knn_k < 1:
            raise ValueError("knn_k must be >= 1")
        if self.svm_c <= 0:
            raise ValueError("svm_c must be positive")

    def to_dict(self):
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


def build_model(spec: ModelSpec):
    """Fresh unfitted learner for a feature-vector model kind."""
    if spec.kind is ModelKind.KNN:
        return KNNClassifier(spec.knn_k)
    if spec.kind is ModelKind.NB:
        return GaussianNB(spec.nb_smoothing)
    if spec.kind is ModelKind.DT:
        return DecisionTreeClassifier(spec.dt_max_depth, criterion=spec.dt_criterion)
    if spec.kind is ModelKind.SVM:
        return LinearSVM(spec.svm_c, spec.svm_epochs, spec.seed)
    if spec.kind is ModelKind.LR:
        return LinearRegression()
    raise ValueError(f"{spec.kind.value} is a relational baseline, not a vector model")


__all__ = [
    "DecisionTreeClassifier", "GaussianNB", "KNNClassifier", "LinearRegression", "LinearSVM",
    "Majority", "ModelKind", "ModelSpec", "WVRN", "build_model", "gini",
    "householder_qr_pivoted", "lstsq_qr", "split_impurity",
]
