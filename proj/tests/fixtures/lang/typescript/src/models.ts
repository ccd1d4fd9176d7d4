export interface Entity {
  id: string;
  describe(): string;
}

export abstract class Model implements Entity {
  constructor(public id: string) {}

  abstract describe(): string;

  protected tag(): string {
    return `model:${this.id}`;
  }
}

export class User extends Model {
  private roles: string[] = [];

  describe(): string {
    return this.tag() + formatName(this.id);
  }

  addRole = (role: string): void => {
    this.roles.push(role);
  };
}

function formatName(n: string): string {
  return n.trim();
}

export namespace Registry {
  export function create(id: string): User {
    return new User(id);
  }
}
