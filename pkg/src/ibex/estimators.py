"""scikit-learn style wrappers around the three phases.

    pipe = make_pipeline(CandidateExtractor("gtin"), OutlierFilter(), NameResolver())
    pipe.fit(pages)
    pipe[-1].predict(["8806085725072"])

Phase 1 is stateless, so ``CandidateExtractor.fit`` only validates.  The
filter learns the outlier id of every name; the resolver learns one entity
per id.
"""
from __future__ import annotations

from typing import Optional

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .aggregate import OutlierParams, apply_outliers, find_outliers, phase3_resolve
from .idspec import IdType, config_for
from .nerfind import load_dictionary
from .records import extract_page, formula_finder
from .validation import check_ids, check_outlier_params, check_pages, check_rows

ATTRIBUTES = ("name", "formula")


class CandidateExtractor(TransformerMixin, BaseEstimator):
    """Pages -> R1 candidate rows for one id type."""

    def __init__(self, id_type="gtin", dictionary_path=None, attribute="name"):
        self.id_type = id_type
        self.dictionary_path = dictionary_path
        self.attribute = attribute

    def _check_params(self):
        IdType.parse(self.id_type)
        if self.attribute not in ATTRIBUTES:
            raise ValueError(f"attribute must be one of {ATTRIBUTES}, got {self.attribute!r}")

    def fit(self, X, y=None):
        self._check_params()
        check_pages(X)
        self.names_ = load_dictionary(self.dictionary_path)
        return self

    def transform(self, X):
        check_is_fitted(self, "names_")
        t = IdType.parse(self.id_type)
        finder = formula_finder if self.attribute == "formula" else None
        rows = []
        for page in check_pages(X):
            rows.extend(extract_page(page.body, page.url, [t], self.names_, finder).rows[t])
        return sorted(rows, key=lambda r: r.sort_key())


class OutlierFilter(TransformerMixin, BaseEstimator):
    """R1 -> R2: keep the rows of names that have a clear outlier id."""

    def __init__(self, i=3, p=0.30, dedupe=False):
        self.i = i
        self.p = p
        self.dedupe = dedupe

    def fit(self, X, y=None):
        check_outlier_params(self.i, self.p)
        rows = check_rows(X)
        params = OutlierParams(self.i, self.p)
        self.outliers_ = find_outliers((r for r in rows if not config_for(r.id.id_type).skip_phase2),
                                       params, self.dedupe)
        self.n_names_ = len({r.name_norm for r in rows})
        return self

    def transform(self, X):
        check_is_fitted(self, "outliers_")
        return apply_outliers(check_rows(X), self.outliers_)


class NameResolver(BaseEstimator):
    """R2 -> R3: one name per id."""

    def fit(self, X, y=None):
        self.entities_ = {e.id: e for e in phase3_resolve(check_rows(X))}
        return self

    def transform(self, X=None):
        check_is_fitted(self, "entities_")
        return [self.entities_[k] for k in sorted(self.entities_, key=lambda v: v.canonical)]

    def predict(self, X) -> list[Optional[str]]:
        """Resolved raw name per id, None for ids never seen."""
        check_is_fitted(self, "entities_")
        out = []
        for vid in check_ids(X):
            e = self.entities_.get(vid)
            out.append(None if e is None else e.name_raw)
        return out
