from typing import Generator, Self


class VisitSubclassesMixin:
    @classmethod
    def visit_subclasses(cls) -> Generator[type[Self], None, None]:
        for subclass in cls.__subclasses__():
            yield subclass
            yield from subclass.visit_subclasses()


class CreateInstanceMixin:
    @classmethod
    def create_instance(cls, *args, **kwargs):
        return cls(*args, **kwargs)


class KindRegistryMixin(VisitSubclassesMixin):
    """Resolve a concrete subclass from the `kind` string it declares."""

    kind: str = None

    @classmethod
    def get_class(cls, kind: str) -> type[Self]:
        if cls.kind == kind:
            return cls

        for subclass in cls.visit_subclasses():
            if subclass.kind == kind:
                return subclass

        raise ValueError(f'Could not find {cls.__name__} for kind "{kind}"')

    @classmethod
    def kinds(cls) -> list[str]:
        return [subclass.kind for subclass in cls.visit_subclasses() if subclass.kind]
