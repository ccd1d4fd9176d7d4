import { User, Registry } from './models';
import type { Entity } from './models';

export type Lookup = (id: string) => Entity | undefined;

export class UserService {
  private readonly users = new Map<string, User>();

  add(id: string): User {
    const user = Registry.create(id);
    this.users.set(id, user);
    return user;
  }

  find: Lookup = (id) => this.users.get(id);
}

export const makeService = (): UserService => new UserService();
