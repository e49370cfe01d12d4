from contextlib import contextmanager

import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from main import main
from src.database.models import Base


SQLALCHEMY_DATABASE_URL = "sqlite:///./test.db"

engine = create_engine(
    SQLALCHEMY_DATABASE_URL, connect_args={"check_same_thread": False}
)
TestingSessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


@pytest.fixture(scope="module")
def session():
    # Create the database

    Base.metadata.drop_all(bind=engine)
    Base.metadata.create_all(bind=engine)

    db = TestingSessionLocal()
    try:
        yield db
    finally:
        db.close()


@pytest.fixture(scope="module")
def archive(session):
    # Point the archive commands at the test database

    @contextmanager
    def override_get_db():
        yield session

    patch = pytest.MonkeyPatch()
    for module in ("src.commands.fields", "src.commands.runs"):
        patch.setattr(f"{module}.get_db", override_get_db)
        patch.setattr(f"{module}.init_db", lambda: None)
    yield session
    patch.undo()


@pytest.fixture
def cli(capsys):
    """Run the command line in-process and return (exit code, stdout, stderr)."""

    def run(*argv):
        try:
            code = main([str(arg) for arg in argv])
        except SystemExit as exc:
            code = exc.code
        out, err = capsys.readouterr()
        return code, out, err

    return run
