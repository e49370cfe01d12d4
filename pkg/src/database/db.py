from contextlib import contextmanager

from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.exc import SQLAlchemyError

from src.conf.config import settings
from src.database.models import Base
from src.errors import StorageError


URI = settings.database_url

engine = create_engine(URI, echo=False)
DBSession = sessionmaker(bind=engine, autoflush=False, autocommit=False)


def init_db(bind=None):
    """Create the archive tables when they are missing (alembic manages upgrades)."""
    Base.metadata.create_all(bind=bind or engine)


@contextmanager
def get_db():
    db = DBSession()
    try:
        yield db
    except SQLAlchemyError as err:
        db.rollback()
        raise StorageError(str(err)) from err
    finally:
        db.close()
